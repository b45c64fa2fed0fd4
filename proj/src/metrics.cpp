// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "error.hpp"

namespace hybridtess::metrics {

double smape_term(double actual, double forecast) {
    const double denom = forecast + actual;
    if (denom == 0.0) {
        return 0.0;
    }
    return 100.0 * std::abs(forecast - actual) / denom;
}

double smape(std::span<const double> actual, std::span<const double> forecast) {
    require(actual.size() == forecast.size(), ErrorKind::Domain, "smape: length mismatch");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        const double denom = forecast[t] + actual[t];
        if (denom == 0.0) {
            continue;
        }
        sum += std::abs(forecast[t] - actual[t]) / denom;
        ++n;
    }
    require(n > 0, ErrorKind::UndefinedMetric, "smape: every term is 0/0");
    return 100.0 * sum / static_cast<double>(n);
}

double seasonal_naive_scale(std::span<const double> training, std::size_t m) {
    require(m >= 1, ErrorKind::Domain, "mase: season must be positive");
    require(training.size() > m, ErrorKind::Domain, "mase: training series not longer than the season");
    double sum = 0.0;
    for (std::size_t t = m; t < training.size(); ++t) {
        sum += std::abs(training[t] - training[t - m]);
    }
    return sum / static_cast<double>(training.size() - m);
}

double mase(std::span<const double> actual, std::span<const double> forecast,
            std::span<const double> training, std::size_t m) {
    require(actual.size() == forecast.size(), ErrorKind::Domain, "mase: length mismatch");
    require(!actual.empty(), ErrorKind::Domain, "mase: empty horizon");
    const double scale = seasonal_naive_scale(training, m);
    require(scale > 0.0, ErrorKind::UndefinedMetric, "mase: training series is m-periodic");
    double mae = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        mae += std::abs(actual[t] - forecast[t]);
    }
    mae /= static_cast<double>(actual.size());
    return mae / scale;
}

double Acf::fraction_inside_band() const {
    if (rho.size() < 2) {
        return 1.0;
    }
    std::size_t inside = 0;
    for (std::size_t k = 1; k < rho.size(); ++k) {
        if (std::abs(rho[k]) <= band) {
            ++inside;
        }
    }
    return static_cast<double>(inside) / static_cast<double>(rho.size() - 1);
}

Acf acf(std::span<const double> x, std::size_t max_lag) {
    const std::size_t n = x.size();
    require(n >= max_lag + 1, ErrorKind::Domain, "acf: series shorter than max_lag + 1");
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double c0 = 0.0;
    for (double v : x) {
        c0 += (v - mean) * (v - mean);
    }
    require(c0 > 0.0, ErrorKind::UndefinedMetric, "acf: zero-variance series");
    Acf out;
    out.rho.resize(max_lag + 1);
    out.rho[0] = 1.0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (std::size_t t = k; t < n; ++t) {
            ck += (x[t] - mean) * (x[t - k] - mean);
        }
        out.rho[k] = ck / c0;
    }
    out.band = 2.0 / std::sqrt(static_cast<double>(n));
    return out;
}

TestResult ljung_box(std::span<const double> residuals, std::size_t max_lag) {
    require(max_lag >= 1, ErrorKind::Domain, "ljung_box: max_lag must be positive");
    require(residuals.size() > max_lag, ErrorKind::Domain, "ljung_box: series not longer than max_lag");
    const auto r = acf(residuals, max_lag);
    const auto n = static_cast<double>(residuals.size());
    double q = 0.0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        q += r.rho[k] * r.rho[k] / (n - static_cast<double>(k));
    }
    q *= n * (n + 2.0);
    return {q, chi_squared_sf(q, static_cast<double>(max_lag))};
}

namespace {

// Series for P(a, x); converges quickly for x < a + 1.
double gamma_p_series(double a, double x, double log_prefix) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) {
            break;
        }
    }
    return std::min(1.0, sum * std::exp(log_prefix));
}

// Lentz continued fraction for Q(a, x); used for x >= a + 1.
double gamma_q_fraction(double a, double x, double log_prefix) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17) {
            break;
        }
    }
    return std::clamp(std::exp(log_prefix) * h, 0.0, 1.0);
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    require(a > 0.0 && x >= 0.0, ErrorKind::Domain, "incomplete gamma: bad arguments");
    if (x == 0.0) {
        return 0.0;
    }
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        return gamma_p_series(a, x, log_prefix);
    }
    return 1.0 - gamma_q_fraction(a, x, log_prefix);
}

double chi_squared_sf(double x, double dof) {
    require(dof > 0.0, ErrorKind::Domain, "chi-squared: dof must be positive");
    if (x <= 0.0) {
        return 1.0;
    }
    const double a = dof / 2.0;
    const double h = x / 2.0;
    const double log_prefix = a * std::log(h) - h - std::lgamma(a);
    if (h < a + 1.0) {
        return 1.0 - gamma_p_series(a, h, log_prefix);
    }
    return gamma_q_fraction(a, h, log_prefix);
}

double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0) {
        return 1.0;
    }
    // The alternating series converges too slowly below ~0.2 where Q == 1 to double precision.
    if (lambda < 0.2) {
        return 1.0;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-18) {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    require(!a.empty() && !b.empty(), ErrorKind::Domain, "ks: empty sample");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const auto na = static_cast<double>(sa.size());
    const auto nb = static_cast<double>(sb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) {
            ++i;
        }
        while (j < sb.size() && sb[j] <= x) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double n_eff = na * nb / (na + nb);
    return {d, kolmogorov_sf(std::sqrt(n_eff) * d)};
}

Ecdf::Ecdf(std::span<const double> sample) : sorted_(sample.begin(), sample.end()) {
    require(!sorted_.empty(), ErrorKind::Domain, "ecdf of an empty sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

}  // namespace hybridtess::metrics
