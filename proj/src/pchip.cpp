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

#include "rqt/pchip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rqt {

namespace {

int sign(double v) {
    return (v > 0.0) - (v < 0.0);
}

double end_slope(double h0, double h1, double del0, double del1) {
    double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (sign(d) != sign(del0)) {
        d = 0.0;
    } else if (sign(del0) != sign(del1) && std::abs(d) > std::abs(3.0 * del0)) {
        d = 3.0 * del0;
    }
    return d;
}

} // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) {
        throw std::invalid_argument("monotone cubic needs at least two knots with matching values");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) {
            throw std::invalid_argument("monotone cubic knots must be strictly increasing");
        }
    }

    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x_[k + 1] - x_[k];
        del[k] = (y_[k + 1] - y_[k]) / h[k];
    }

    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = del[0];
        return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (sign(del[k - 1]) * sign(del[k]) > 0) {
            const double w1 = 2.0 * h[k] + h[k - 1];
            const double w2 = h[k] + 2.0 * h[k - 1];
            d_[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
        }
    }
    d_[0] = end_slope(h[0], h[1], del[0], del[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
}

std::size_t MonotoneCubic::interval(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(k, x_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
    const std::size_t k = interval(x);
    const double h = x_[k + 1] - x_[k];
    const double del = (y_[k + 1] - y_[k]) / h;
    const double c2 = (3.0 * del - 2.0 * d_[k] - d_[k + 1]) / h;
    const double c3 = (d_[k] - 2.0 * del + d_[k + 1]) / (h * h);
    const double s = x - x_[k];
    return y_[k] + s * (d_[k] + s * (c2 + s * c3));
}

double MonotoneCubic::piece_integral(std::size_t k, double s) const {
    const double h = x_[k + 1] - x_[k];
    const double del = (y_[k + 1] - y_[k]) / h;
    const double c2 = (3.0 * del - 2.0 * d_[k] - d_[k + 1]) / h;
    const double c3 = (d_[k] - 2.0 * del + d_[k + 1]) / (h * h);
    return s * (y_[k] + s * (d_[k] / 2.0 + s * (c2 / 3.0 + s * c3 / 4.0)));
}

double MonotoneCubic::integrate(double a, double b) const {
    if (b < a) {
        return -integrate(b, a);
    }
    const std::size_t ka = interval(a);
    const std::size_t kb = interval(b);
    if (ka == kb) {
        return piece_integral(ka, b - x_[ka]) - piece_integral(ka, a - x_[ka]);
    }
    double total = piece_integral(ka, x_[ka + 1] - x_[ka]) - piece_integral(ka, a - x_[ka]);
    for (std::size_t k = ka + 1; k < kb; ++k) {
        total += piece_integral(k, x_[k + 1] - x_[k]);
    }
    total += piece_integral(kb, b - x_[kb]);
    return total;
}

} // namespace rqt
