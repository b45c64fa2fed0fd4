// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include "stl.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace hybridtess::stl {

std::size_t next_odd(double x) {
    auto v = static_cast<std::size_t>(std::ceil(x));
    if (v % 2 == 0) {
        ++v;
    }
    return std::max<std::size_t>(v, 3);
}

double loess_at(std::span<const double> y, std::span<const double> robustness, std::size_t span, double x,
                int degree) {
    const std::size_t n = y.size();
    const std::size_t q = std::min(span, n);
    // Window of the q samples nearest to x.
    const double centre = std::clamp(x, 0.0, static_cast<double>(n - 1));
    auto lo = static_cast<std::ptrdiff_t>(std::floor(centre - static_cast<double>(q - 1) / 2.0));
    lo = std::clamp<std::ptrdiff_t>(lo, 0, static_cast<std::ptrdiff_t>(n - q));
    auto hi = lo + static_cast<std::ptrdiff_t>(q) - 1;
    // Slide toward x while that tightens the window.
    while (hi + 1 < static_cast<std::ptrdiff_t>(n) && x - static_cast<double>(lo) > static_cast<double>(hi + 1) - x) {
        ++lo;
        ++hi;
    }
    while (lo > 0 && static_cast<double>(hi) - x > x - static_cast<double>(lo - 1)) {
        --lo;
        --hi;
    }
    double h = std::max(x - static_cast<double>(lo), static_cast<double>(hi) - x);
    if (span > n) {
        h += static_cast<double>(span - n) / 2.0;
    }
    h = std::max(h, 0.5);

    double sw = 0.0;
    double swx = 0.0;
    double swy = 0.0;
    double swxx = 0.0;
    double swxy = 0.0;
    for (auto i = lo; i <= hi; ++i) {
        const double xi = static_cast<double>(i);
        const double r = std::abs(xi - x) / h;
        if (r >= 1.0) {
            continue;
        }
        const double c = 1.0 - r * r * r;
        const double w = c * c * c * robustness[static_cast<std::size_t>(i)];
        const double yi = y[static_cast<std::size_t>(i)];
        sw += w;
        swx += w * xi;
        swy += w * yi;
        swxx += w * xi * xi;
        swxy += w * xi * yi;
    }
    if (sw <= 0.0) {
        // All weights vanished (heavy robustness downweighting); fall back to the plain window mean.
        double s = 0.0;
        for (auto i = lo; i <= hi; ++i) {
            s += y[static_cast<std::size_t>(i)];
        }
        return s / static_cast<double>(hi - lo + 1);
    }
    const double mean_y = swy / sw;
    if (degree == 0) {
        return mean_y;
    }
    const double mean_x = swx / sw;
    const double var_x = swxx / sw - mean_x * mean_x;
    const double range = static_cast<double>(hi - lo);
    if (var_x <= 1e-10 * (range * range + 1.0)) {
        return mean_y;
    }
    const double slope = (swxy / sw - mean_x * mean_y) / var_x;
    return mean_y + slope * (x - mean_x);
}

namespace {

std::vector<double> moving_average(std::span<const double> x, std::size_t len) {
    std::vector<double> out(x.size() - len + 1);
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        s += x[i];
    }
    out[0] = s / static_cast<double>(len);
    for (std::size_t i = 1; i < out.size(); ++i) {
        s += x[i + len - 1] - x[i - 1];
        out[i] = s / static_cast<double>(len);
    }
    return out;
}

double median(std::vector<double> v) {
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return (lower + upper) / 2.0;
}

}  // namespace

Decomposition decompose(std::span<const double> y, std::size_t period, const Options& options) {
    const std::size_t n = y.size();
    const std::size_t m = period;
    require(m >= 2, ErrorKind::Domain, "stl: period must be at least 2");
    require(n >= 2 * m + 1, ErrorKind::Domain, "stl: series shorter than two periods plus one");
    for (double v : y) {
        require(std::isfinite(v), ErrorKind::Domain, "stl: non-finite value");
    }
    const std::size_t ns = options.seasonal_span;
    const std::size_t nt = options.trend_span != 0 ? options.trend_span : next_odd(1.5 * static_cast<double>(m));
    const std::size_t nl = options.lowpass_span != 0 ? options.lowpass_span : next_odd(static_cast<double>(m));

    std::vector<double> rw(n, 1.0);
    std::vector<double> trend(n, 0.0);
    std::vector<double> seasonal(n, 0.0);
    std::vector<double> cycle(n + 2 * m);
    std::vector<double> detrended(n);
    std::vector<double> deseason(n);
    std::vector<double> sub;
    std::vector<double> sub_w;
    const std::vector<double> ones(n + 2 * m, 1.0);

    for (int outer = 0; outer <= options.robust_iterations; ++outer) {
        for (int inner = 0; inner < options.inner_iterations; ++inner) {
            for (std::size_t t = 0; t < n; ++t) {
                detrended[t] = y[t] - trend[t];
            }
            // Cycle-subseries smoothing, extended one cycle at each end.
            for (std::size_t k = 0; k < m; ++k) {
                sub.clear();
                sub_w.clear();
                for (std::size_t t = k; t < n; t += m) {
                    sub.push_back(detrended[t]);
                    sub_w.push_back(rw[t]);
                }
                const auto len = static_cast<std::ptrdiff_t>(sub.size());
                for (std::ptrdiff_t p = -1; p <= len; ++p) {
                    cycle[k + m * static_cast<std::size_t>(p + 1)] =
                        loess_at(sub, sub_w, ns, static_cast<double>(p), 1);
                }
            }
            // Low-pass filter of the cycle series.
            const auto ma1 = moving_average(std::span<const double>(cycle.data(), n + 2 * m), m);
            const auto ma2 = moving_average(ma1, m);
            const auto ma3 = moving_average(ma2, 3);
            for (std::size_t t = 0; t < n; ++t) {
                const double low = loess_at(ma3, std::span<const double>(ones.data(), n), nl, static_cast<double>(t), 1);
                seasonal[t] = cycle[t + m] - low;
                deseason[t] = y[t] - seasonal[t];
            }
            for (std::size_t t = 0; t < n; ++t) {
                trend[t] = loess_at(deseason, rw, nt, static_cast<double>(t), 1);
            }
        }
        if (outer < options.robust_iterations) {
            std::vector<double> abs_r(n);
            for (std::size_t t = 0; t < n; ++t) {
                abs_r[t] = std::abs(y[t] - seasonal[t] - trend[t]);
            }
            const double h = 6.0 * median(abs_r);
            for (std::size_t t = 0; t < n; ++t) {
                if (h <= 0.0) {
                    rw[t] = 1.0;
                    continue;
                }
                const double u = abs_r[t] / h;
                rw[t] = u < 1.0 ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
            }
        }
    }

    Decomposition d;
    d.remainder.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        d.remainder[t] = y[t] - seasonal[t] - trend[t];
    }
    d.seasonal = std::move(seasonal);
    d.trend = std::move(trend);
    d.weights = std::move(rw);
    return d;
}

}  // namespace hybridtess::stl
