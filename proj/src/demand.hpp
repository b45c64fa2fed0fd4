// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "geo.hpp"
#include "voronoi.hpp"

namespace hybridtess::demand {

struct Event {
    std::int64_t timestamp = 0;  ///< UTC seconds
    LatLon where;
    std::optional<std::string> user_id;  ///< absent for street-hail data
};

/// `a`: user_id,timestamp_iso8601,lat,lon. `b`: NYC yellow-taxi columns by header name.
enum class Schema { A, B };

struct IngestResult {
    std::vector<Event> events;
    std::size_t malformed = 0;
    std::size_t out_of_bounds = 0;
};

/// Reads events; rows that fail to parse are counted, not fatal. When `city`
/// is given, events outside it are counted and dropped.
IngestResult read_events(std::istream& in, Schema schema, const std::optional<GeoBounds>& city = std::nullopt);

void write_events(std::ostream& out, std::span<const Event> events);

/// Contiguous half-open bins [start + i*period, start + (i+1)*period).
struct TimeGrid {
    std::int64_t start = 0;
    int period_minutes = 60;
    std::size_t n_bins = 0;

    std::int64_t period_seconds() const { return static_cast<std::int64_t>(period_minutes) * 60; }
    std::int64_t bin_start(std::size_t i) const { return start + static_cast<std::int64_t>(i) * period_seconds(); }
    std::int64_t end() const { return bin_start(n_bins); }
    std::optional<std::size_t> bin_of(std::int64_t t) const;
    std::size_t bins_per_day() const { return static_cast<std::size_t>(1440 / period_minutes); }
};

bool valid_period(int minutes);

/// Grid of whole days starting at the UTC midnight at or before `first`.
TimeGrid day_aligned_grid(std::int64_t first, std::int64_t last, int period_minutes);

struct BoxCox {
    double lambda = 1.0;

    /// ((y+1)^lambda - 1)/lambda, or log(y+1) at lambda == 0.
    double forward(double y) const;
    double inverse(double z) const;
};

/// Lambda from {0, 0.1, ..., 1} maximising the Gaussian profile log-likelihood.
double boxcox_auto_lambda(std::span<const double> training);

struct Series {
    std::string partition_id;
    std::vector<double> values;  ///< per-bin demand per km^2
    double area_km2 = 0.0;
    std::optional<BoxCox> transform;
};

/// Applies the transform to every value; lambda must be in [-1, 2].
Series boxcox(const Series& series, double lambda);
Series inverse_boxcox(const Series& series);

struct DedupResult {
    std::vector<Event> kept;  ///< time-ordered
    std::size_t dropped = 0;
};

/// Sliding keep-first: within a (user, partition) pair an event is dropped when
/// the pair has a kept event less than `window_minutes` earlier.
DedupResult dedup(std::span<const Event> events, const std::function<std::string(const Event&)>& partition_of,
                  int window_minutes = 30);

struct AggregateStats {
    std::size_t kept = 0;
    std::size_t out_of_window = 0;
    std::size_t out_of_bounds = 0;
};

struct Aggregation {
    std::vector<Series> series;
    AggregateStats stats;
};

/// Counts per (partition, bin) divided by the partition area. `assignment[i]`
/// is event i's partition, or nullopt when it lies outside every partition.
Aggregation aggregate(std::span<const Event> events, std::span<const std::optional<std::size_t>> assignment,
                      std::span<const std::string> ids, std::span<const double> areas_km2, const TimeGrid& grid);

/// Geohash cells at `level`: every cell with an event plus every cell in
/// `extra_cells`, sorted by code.
Aggregation aggregate_geohash(std::span<const Event> events, int level, const TimeGrid& grid,
                              std::span<const std::string> extra_cells = {});

/// One series per Voronoi cell, id `v<index>`.
Aggregation aggregate_voronoi(std::span<const Event> events, const voronoi::Diagram& diagram, const TimeGrid& grid);

std::string voronoi_id(std::size_t index);

/// `partition_id,bin_start_iso8601,d_norm`.
void write_series_csv(std::ostream& out, std::span<const Series> series, const TimeGrid& grid);

}  // namespace hybridtess::demand
