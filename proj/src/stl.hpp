// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hybridtess::stl {

/// Local regression at position `x` over samples at positions 0..n-1, using
/// the `span` nearest samples, tricube distance weights times `robustness`.
/// Degree 0 or 1. Returns the weighted mean of the window if the local fit is
/// degenerate.
double loess_at(std::span<const double> y, std::span<const double> robustness, std::size_t span, double x,
                int degree = 1);

struct Options {
    std::size_t seasonal_span = 7;
    std::size_t trend_span = 0;    ///< 0: next odd >= 1.5 * period
    std::size_t lowpass_span = 0;  ///< 0: next odd >= period
    int inner_iterations = 2;
    int robust_iterations = 1;
};

struct Decomposition {
    std::vector<double> seasonal;
    std::vector<double> trend;
    std::vector<double> remainder;  ///< y - seasonal - trend
    std::vector<double> weights;    ///< final robustness weights
};

/// Seasonal-trend decomposition by LOESS. Requires length >= 2 * period + 1.
Decomposition decompose(std::span<const double> y, std::size_t period, const Options& options = {});

std::size_t next_odd(double x);

}  // namespace hybridtess::stl
