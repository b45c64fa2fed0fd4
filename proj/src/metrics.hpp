// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hybridtess::metrics {

/// Symmetric MAPE, 100/N * sum |f - a| / (f + a). Steps where f + a == 0 are
/// skipped and N shrinks accordingly. Throws UndefinedMetric when every step
/// is skipped. Bounded by 100 for nonnegative input.
double smape(std::span<const double> actual, std::span<const double> forecast);

/// One SMAPE term in percent; zero when both values are zero.
double smape_term(double actual, double forecast);

/// Mean absolute scaled error: test MAE over the in-sample MAE of the lag-m
/// seasonal naive forecast on `training`.
double mase(std::span<const double> actual, std::span<const double> forecast,
            std::span<const double> training, std::size_t m);

/// In-sample MAE of the lag-m seasonal naive forecast (the MASE scale).
double seasonal_naive_scale(std::span<const double> training, std::size_t m);

struct Acf {
    std::vector<double> rho;  ///< rho[0] == 1, up to max_lag inclusive
    double band = 0.0;        ///< 2/sqrt(N)

    /// Fraction of lags 1..max_lag with |rho| <= band.
    double fraction_inside_band() const;
};

/// Biased-normalisation sample autocorrelation.
Acf acf(std::span<const double> x, std::size_t max_lag);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Ljung-Box portmanteau test with `max_lag` degrees of freedom.
TestResult ljung_box(std::span<const double> residuals, std::size_t max_lag);

/// Two-sample Kolmogorov-Smirnov test, asymptotic p-value.
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Upper tail of the chi-squared distribution.
double chi_squared_sf(double x, double dof);

/// Regularised lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Kolmogorov distribution upper tail Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

/// Right-continuous empirical CDF.
class Ecdf {
public:
    explicit Ecdf(std::span<const double> sample);

    double operator()(double x) const;
    const std::vector<double>& sorted() const { return sorted_; }

private:
    std::vector<double> sorted_;
};

}  // namespace hybridtess::metrics
