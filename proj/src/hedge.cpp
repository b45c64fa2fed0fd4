// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include "hedge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "error.hpp"

namespace hybridtess::hedge {

namespace {

// log(DBL_TRUE_MIN); keeps beta == 0 finite in the log domain.
constexpr double kLogFloor = -744.0;

void check_errors(std::span<const double> raw_errors, std::size_t experts) {
    require(raw_errors.size() == experts, ErrorKind::Domain, "hedge: wrong number of expert errors");
    for (double e : raw_errors) {
        require(std::isfinite(e) && e >= 0.0, ErrorKind::Domain, "hedge: errors must be finite and >= 0");
    }
}

}  // namespace

std::vector<double> normalized_losses(std::span<const double> raw_errors) {
    check_errors(raw_errors, raw_errors.size());
    const double total = std::accumulate(raw_errors.begin(), raw_errors.end(), 0.0);
    std::vector<double> l(raw_errors.size(), 0.0);
    if (total > 0.0) {
        for (std::size_t i = 0; i < l.size(); ++i) {
            l[i] = raw_errors[i] / total;
        }
    }
    return l;
}

std::vector<double> discounted_update(std::span<const double> weights, std::span<const double> losses, double beta,
                                      double gamma) {
    require(weights.size() == losses.size(), ErrorKind::Domain, "hedge: weights/losses size mismatch");
    std::vector<double> out(weights.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::pow(weights[i], gamma) * std::pow(beta, losses[i]);
    }
    return out;
}

Hedge::Hedge(std::size_t experts, double beta, double gamma) : beta_(beta), gamma_(gamma) {
    require(experts >= 1, ErrorKind::Domain, "hedge: need at least one expert");
    require(beta >= 0.0 && beta <= 1.0, ErrorKind::Domain, "hedge: beta must be in [0, 1]");
    require(gamma >= 0.0 && gamma <= 1.0, ErrorKind::Domain, "hedge: gamma must be in [0, 1]");
    log_beta_ = beta > 0.0 ? std::max(std::log(beta), kLogFloor) : kLogFloor;
    log_w_.assign(experts, -std::log(static_cast<double>(experts)));
}

std::size_t Hedge::choose() const {
    const double best = *std::max_element(log_w_.begin(), log_w_.end());
    if (log_w_[incumbent_] == best) {
        return incumbent_;
    }
    return static_cast<std::size_t>(std::find(log_w_.begin(), log_w_.end(), best) - log_w_.begin());
}

std::size_t Hedge::step(std::span<const double> raw_errors) {
    check_errors(raw_errors, log_w_.size());
    const std::size_t chosen = choose();
    incumbent_ = chosen;

    TraceRow row;
    row.chosen = chosen;
    row.errors.assign(raw_errors.begin(), raw_errors.end());
    row.losses = normalized_losses(raw_errors);
    row.weights = weights();

    for (std::size_t i = 0; i < log_w_.size(); ++i) {
        log_w_[i] = gamma_ * log_w_[i] + row.losses[i] * log_beta_;
    }
    // Renormalise to sum 1 (log-sum-exp).
    const double top = *std::max_element(log_w_.begin(), log_w_.end());
    double sum = 0.0;
    for (double lw : log_w_) {
        sum += std::exp(lw - top);
    }
    const double log_norm = top + std::log(sum);
    for (double& lw : log_w_) {
        lw -= log_norm;
    }

    trace_.push_back(std::move(row));
    return chosen;
}

std::vector<double> Hedge::weights() const {
    std::vector<double> w(log_w_.size());
    std::transform(log_w_.begin(), log_w_.end(), w.begin(), [](double lw) { return std::exp(lw); });
    return w;
}

double RunResult::mean_hybrid_error() const {
    if (hybrid_errors.empty()) {
        return 0.0;
    }
    return std::accumulate(hybrid_errors.begin(), hybrid_errors.end(), 0.0) /
           static_cast<double>(hybrid_errors.size());
}

RunResult run(const std::vector<std::vector<double>>& streams, double beta, double gamma) {
    require(!streams.empty(), ErrorKind::Domain, "hedge run: no experts");
    const std::size_t steps = streams.front().size();
    require(steps >= 1, ErrorKind::Domain, "hedge run: empty error streams");
    for (const auto& s : streams) {
        require(s.size() == steps, ErrorKind::Domain, "hedge run: stream length mismatch");
    }

    Hedge h(streams.size(), beta, gamma);
    RunResult out;
    out.beta = beta;
    out.gamma = gamma;
    out.choices.reserve(steps);
    out.hybrid_errors.reserve(steps);
    std::vector<double> errs(streams.size());
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t i = 0; i < streams.size(); ++i) {
            errs[i] = streams[i][t];
        }
        const std::size_t c = h.step(errs);
        if (t > 0 && c != out.choices.back()) {
            ++out.switches;
        }
        out.choices.push_back(c);
        out.hybrid_errors.push_back(errs[c]);
        out.weights.push_back(h.weights());
    }
    out.trace = h.trace();
    return out;
}

std::vector<double> default_grid() { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }

TuneResult tune(const std::vector<std::vector<double>>& validation_streams, std::vector<double> beta_grid,
                std::vector<double> gamma_grid) {
    require(!beta_grid.empty() && !gamma_grid.empty(), ErrorKind::Domain, "hedge tune: empty grid");
    require(!validation_streams.empty() && !validation_streams.front().empty(), ErrorKind::Domain,
            "hedge tune: empty validation streams");
    std::sort(beta_grid.begin(), beta_grid.end());
    std::sort(gamma_grid.begin(), gamma_grid.end());
    TuneResult best{0.0, 0.0, std::numeric_limits<double>::infinity()};
    for (double g : gamma_grid) {
        for (double b : beta_grid) {
            const double e = run(validation_streams, b, g).mean_hybrid_error();
            if (e < best.mean_error) {
                best = {b, g, e};
            }
        }
    }
    return best;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
    const std::size_t k = trace.empty() ? 2 : trace.front().errors.size();
    os << "t,chosen_expert";
    for (const char* prefix : {"e_", "l_", "w_"}) {
        for (std::size_t i = 0; i < k; ++i) {
            os << ',' << prefix << i;
        }
    }
    os << '\n';
    char buf[64];
    for (std::size_t t = 0; t < trace.size(); ++t) {
        os << t << ',' << trace[t].chosen;
        for (const auto* v : {&trace[t].errors, &trace[t].losses, &trace[t].weights}) {
            for (double x : *v) {
                std::snprintf(buf, sizeof buf, ",%.17g", x);
                os << buf;
            }
        }
        os << '\n';
    }
}

}  // namespace hybridtess::hedge
