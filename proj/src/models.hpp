// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "demand.hpp"

namespace hybridtess::models {

enum class Kind { Baseline, Naive, SeasonalNaive, Drift, HoltWinters, Stl, TbatsLite };

/// Non-seasonal model applied to the STL seasonally adjusted series.
enum class StlInner { Naive, Drift, Ses, Ar };

using Params = std::vector<std::pair<std::string, double>>;

/// A fitted per-partition predictor. Immutable; parameters are fixed at fit
/// time and later observations only advance the model state.
class Forecaster {
public:
    virtual ~Forecaster() = default;

    virtual Kind kind() const = 0;
    /// Short label, e.g. "hw" or "stl(ses)".
    virtual std::string name() const = 0;
    virtual Params params() const = 0;
    virtual std::vector<std::size_t> periods() const = 0;

    /// Forecasts for steps 1..h past the end of the fitting window.
    virtual std::vector<double> forecast(std::size_t h) const = 0;

    /// One-step-ahead forecasts of series[t] from series[0..t) for every t in
    /// [from, series.size()). series must start with the fitting window.
    virtual std::vector<double> one_step(std::span<const double> series, std::size_t from) const = 0;

    /// In-sample one-step residuals after the model's warm-up.
    const std::vector<double>& residuals() const { return residuals_; }
    std::size_t fitted_length() const { return fitted_length_; }

protected:
    std::vector<double> residuals_;
    std::size_t fitted_length_ = 0;
};

using Model = std::shared_ptr<const Forecaster>;

Model fit_baseline(std::span<const double> series, std::size_t m, std::size_t n_seasons);
Model fit_simple(std::span<const double> series, Kind kind, std::size_t m = 1);
Model fit_holt_winters(std::span<const double> series, std::size_t m);
Model fit_stl(std::span<const double> series, std::size_t m, StlInner inner);

struct TbatsParams {
    double alpha = 0.1;
    double beta = 0.01;
    std::vector<double> gamma;  ///< one gain per period
};

struct TbatsState {
    double level = 0.0;
    double trend = 0.0;
    /// Harmonic states per period: s[i][j], s_star[i][j], j = 0..harmonics-1.
    std::vector<std::vector<double>> s;
    std::vector<std::vector<double>> s_star;
};

/// Trigonometric multiplicative-seasonal model with additive trend.
Model fit_tbats_lite(std::span<const double> series, std::vector<std::size_t> periods,
                     std::vector<std::size_t> harmonics);

/// The TBATS-lite recursion with fixed parameters and initial state; returns
/// one-step forecasts for every t.
std::vector<double> tbats_filter(std::span<const double> series, std::span<const std::size_t> periods,
                                 const TbatsParams& params, TbatsState state);

/// A candidate for per-partition selection.
struct Spec {
    Kind kind = Kind::Baseline;
    StlInner inner = StlInner::Ses;

    std::string name() const;
    static Spec parse(const std::string& text);
};

struct FitConfig {
    std::size_t season = 24;           ///< daily period in bins
    std::size_t baseline_season = 24;  ///< period used by the baseline
    std::size_t baseline_seasons = 7;  ///< N in the baseline mean
    std::vector<std::size_t> tbats_periods{24, 168};
    std::vector<std::size_t> tbats_harmonics{2, 2};
};

Model fit(const Spec& spec, std::span<const double> training, const FitConfig& config);

struct CandidateScore {
    std::string name;
    std::optional<double> smape;  ///< empty when the fit failed
};

struct Selection {
    Model model;
    double validation_smape = 0.0;
    std::vector<CandidateScore> scores;
};

/// Fits each candidate (and the baseline) on `training`, scores one-step
/// SMAPE over `validation`, and returns the best; the baseline unless some
/// candidate is strictly better. With `transform`, inputs are on the
/// transformed scale and scoring happens on the original scale after clamping.
Selection select_model(std::span<const double> training, std::span<const double> validation,
                       const std::vector<Spec>& candidates, const FitConfig& config,
                       const std::optional<demand::BoxCox>& transform = std::nullopt);

/// Maps forecasts back to demand scale: inverse transform then clamp at 0.
std::vector<double> to_demand_scale(std::span<const double> values, const std::optional<demand::BoxCox>& transform);

}  // namespace hybridtess::models
