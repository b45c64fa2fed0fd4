// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

namespace hybridtess::hedge {

struct TraceRow {
    std::size_t chosen = 0;
    std::vector<double> errors;
    std::vector<double> losses;
    std::vector<double> weights;  ///< normalised weights the choice was made from
};

/// Discounted HEDGE picking one expert per step: choose argmax weight, then
/// w_i <- w_i^gamma * beta^(l_i) with l_i = e_i / sum_j e_j, renormalised.
/// gamma == 1 is classic HEDGE. Weights are kept as logs so they never underflow.
class Hedge {
public:
    Hedge(std::size_t experts, double beta, double gamma);

    /// Expert to follow at the current step (incumbent wins ties).
    std::size_t choose() const;

    /// Choose, then update with this step's raw errors. Returns the choice.
    std::size_t step(std::span<const double> raw_errors);

    std::vector<double> weights() const;
    const std::vector<double>& log_weights() const { return log_w_; }
    const std::vector<TraceRow>& trace() const { return trace_; }
    double beta() const { return beta_; }
    double gamma() const { return gamma_; }

private:
    double beta_;
    double gamma_;
    double log_beta_;
    std::vector<double> log_w_;
    std::size_t incumbent_ = 0;
    std::vector<TraceRow> trace_;
};

/// Loss normalisation; all zeros when the errors sum to zero.
std::vector<double> normalized_losses(std::span<const double> raw_errors);

/// The raw update w_i^gamma * beta^(l_i), before renormalisation.
std::vector<double> discounted_update(std::span<const double> weights, std::span<const double> losses, double beta,
                                      double gamma);

struct RunResult {
    std::vector<std::size_t> choices;
    std::vector<double> hybrid_errors;
    std::vector<std::vector<double>> weights;  ///< normalised weights after each update
    std::vector<TraceRow> trace;
    std::size_t switches = 0;
    double beta = 0.0;
    double gamma = 0.0;

    double mean_hybrid_error() const;
};

/// `streams[i][t]` is expert i's error at step t.
RunResult run(const std::vector<std::vector<double>>& streams, double beta, double gamma);

struct TuneResult {
    double beta = 0.0;
    double gamma = 0.0;
    double mean_error = 0.0;
};

std::vector<double> default_grid();

/// Grid search minimising the hybrid mean error; ties go to smaller gamma, then smaller beta.
TuneResult tune(const std::vector<std::vector<double>>& validation_streams, std::vector<double> beta_grid,
                std::vector<double> gamma_grid);

/// `t,chosen_expert,e_0..,l_0..,w_0..` with a header.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

}  // namespace hybridtess::hedge
