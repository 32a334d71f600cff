// Copyright 2026 The rqtpf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <vector>

namespace rqt {

// Piecewise-cubic Hermite interpolant with Fritsch-Carlson style slopes
// (weighted harmonic mean at interior knots, shape-preserving one-sided
// formula at the ends). Never overshoots: on every interval where the data
// are monotone the interpolant is monotone too. Two knots give the chord.
class MonotoneCubic {
public:
    // Knots must be strictly increasing in x and at least two. Throws
    // std::invalid_argument otherwise.
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    // Evaluates the interpolant; outside the knot range the end cubic is extended.
    double operator()(double x) const;

    // Exact integral over [a, b] (a <= b) of the piecewise cubic.
    double integrate(double a, double b) const;

    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    std::span<const double> knots() const { return x_; }
    std::span<const double> values() const { return y_; }
    std::span<const double> slopes() const { return d_; }

private:
    std::size_t interval(double x) const;
    // Antiderivative of piece k from its left knot to offset s.
    double piece_integral(std::size_t k, double s) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> d_;
};

} // namespace rqt
