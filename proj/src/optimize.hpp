// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hybridtess::optimize {

struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    std::vector<double> clamp(std::vector<double> x) const;
};

struct Result {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

/// Derivative-free Nelder-Mead minimisation. Points are clamped into `box`
/// before every evaluation, so the returned `x` always lies inside it.
/// Non-finite objective values are treated as +inf.
Result nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> start,
                   const Box& box, int max_evaluations, double initial_step = 0.1);

/// Runs Nelder-Mead from each start in turn and keeps the best (first wins ties).
Result multi_start(const std::function<double(std::span<const double>)>& f,
                   const std::vector<std::vector<double>>& starts, const Box& box, int max_evaluations_each);

}  // namespace hybridtess::optimize
