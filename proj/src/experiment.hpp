// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "demand.hpp"
#include "hedge.hpp"
#include "kmeans.hpp"
#include "models.hpp"
#include "synth.hpp"
#include "voronoi.hpp"

namespace hybridtess::experiment {

enum class Metric { Smape, Mase };

std::string metric_name(Metric m);

struct Config {
    // Input: a CSV file, or the synthetic city below when `input` is empty.
    std::string input;
    demand::Schema schema = demand::Schema::A;
    synth::CitySpec city;
    int span_days = 14;
    /// Offset (in days from the span start) of the synthetic scatter regime
    /// switch; negative disables it.
    double regime_day = -1.0;
    double regime_scatter = 2.5;

    std::optional<GeoBounds> bbox;
    std::size_t k = 40;
    int geohash_level = 6;
    std::vector<int> periods{60};
    int validation_days = 1;
    int test_days = 1;
    std::vector<models::Spec> candidates;
    Metric metric = Metric::Smape;
    std::vector<double> beta_grid = hedge::default_grid();
    std::vector<double> gamma_grid = hedge::default_grid();
    std::uint64_t seed = 1;
    std::size_t kmeans_sample = 20000;
    int kmeans_max_iter = 300;
    double kmeans_tol = 1e-6;
    int dedup_window = 30;
    bool boxcox = true;
    std::optional<double> boxcox_lambda;  ///< fixed lambda; auto-selected when empty
    std::string out_dir = "out";

    Config();

    /// Applies one `key=value` setting; Config error for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);

    /// `key=value` lines, `#` starts a comment.
    void load(std::istream& in);
    void load_file(const std::string& path);

    void validate() const;
};

struct CellReport {
    std::string partition_id;
    std::string strategy;
    std::string model_kind;
    std::optional<double> smape;  ///< test-horizon SMAPE; empty when undefined
    std::optional<double> mase;   ///< test-horizon MASE; empty when undefined
    double validation_smape = 0.0;
    bool zero_demand = false;
};

struct StrategyRun {
    std::string name;
    std::vector<CellReport> cells;
    std::vector<double> validation_errors;  ///< per-instant mean error over cells
    std::vector<double> test_errors;
    std::size_t zero_demand_cells = 0;

    double mean_test_error() const;
};

struct KsRow {
    std::string a;
    std::string b;
    double statistic = 0.0;
    double p_value = 1.0;
};

struct PeriodRun {
    int period_minutes = 60;
    std::vector<StrategyRun> strategies;  ///< voronoi first, then geohash
    hedge::TuneResult tuned;
    hedge::RunResult hybrid;
    std::vector<KsRow> ks;
    double test_days = 1.0;

    double switches_per_day() const;
};

struct IngestStats {
    std::size_t events = 0;
    std::size_t malformed = 0;
    std::size_t out_of_bounds = 0;
    std::size_t dedup_dropped_voronoi = 0;
    std::size_t dedup_dropped_geohash = 0;
};

struct ReportBundle {
    std::string metric = "smape";
    std::uint64_t seed = 1;
    std::size_t k = 0;
    int geohash_level = 6;
    IngestStats ingest;
    double kmeans_objective = 0.0;
    std::vector<PeriodRun> periods;
};

struct Tessellation {
    GeoBounds bounds;
    kmeans::ClusterModel clusters;
    voronoi::Diagram diagram;
    std::vector<std::string> centroid_cells;  ///< geohash cell of each centroid
};

/// Day-aligned grid over the events' span.
demand::TimeGrid grid_for(std::span<const demand::Event> events, int period_minutes);

/// K-Means on (a seeded sample of) the training-window events, then the
/// Voronoi diagram of the centroids and their geohash cells.
Tessellation tessellate(const Config& config, std::span<const demand::Event> events, const demand::TimeGrid& grid);

struct StrategyDemand {
    std::string name;
    demand::Aggregation aggregation;
    std::vector<std::size_t> evaluated;  ///< indices of the series that get models
    std::size_t dedup_dropped = 0;
};

/// Dedup and aggregation for both strategies (voronoi, geohash).
std::vector<StrategyDemand> build_demand(const Config& config, std::span<const demand::Event> events,
                                         const Tessellation& tess, const demand::TimeGrid& grid);

/// Per-cell model selection and rolling one-step forecasts over the
/// validation and test windows.
StrategyRun forecast_strategy(const Config& config, const StrategyDemand& demand, const demand::TimeGrid& grid);

/// Events from the configured CSV or the synthetic generator.
std::vector<demand::Event> load_events(const Config& config, IngestStats* stats = nullptr);

/// Synthetic spec with the regime switch resolved from `regime_day`.
synth::CitySpec synthetic_spec(const Config& config);

/// Both strategies' cell models and per-instant error streams for one
/// sampling period; the hedge fields are left empty.
PeriodRun forecast_period(const Config& config, std::span<const demand::Event> events, const Tessellation& tess,
                          int period_minutes);

/// Tunes (beta, gamma) on the validation streams and runs the hedge on the test streams.
void hedge_period(const Config& config, PeriodRun& period);

/// Per-instant expert streams: `sampling_period_min,split,t,<strategy>...`.
void write_expert_errors(std::ostream& out, std::span<const PeriodRun> periods);
/// Inverse of write_expert_errors; fills only the strategies' error streams.
std::vector<PeriodRun> read_expert_errors(std::istream& in);

/// `cluster_id,lat,lon,density,geohash`.
void write_centroids(std::ostream& out, const Tessellation& tess, int geohash_level);

using PeriodCallback = std::function<void(const ReportBundle&)>;

ReportBundle run(const Config& config, const PeriodCallback& on_period = {});

/// Same pipeline on already loaded events. `on_period` sees the bundle after
/// each completed sampling period.
ReportBundle run(const Config& config, std::vector<demand::Event> events, IngestStats stats,
                 const PeriodCallback& on_period = {});

/// Runs and writes the report files plus bundle.json into `dir`. On failure
/// the files of completed periods stay, a FAILED marker is written and the
/// error is rethrown.
ReportBundle run_to_dir(const Config& config, const std::string& dir);

/// Writes summary.csv, trace.csv, per_cell.csv, ecdf.csv and cumulative.csv.
void write_report(const ReportBundle& bundle, const std::string& dir);

std::string to_json(const ReportBundle& bundle);
ReportBundle from_json(const std::string& text);

}  // namespace hybridtess::experiment
