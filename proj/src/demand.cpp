// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include "demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include "csv.hpp"
#include "error.hpp"
#include "geohash.hpp"

namespace hybridtess::demand {

namespace {

std::size_t column(const std::vector<std::string>& header, std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    fail(ErrorKind::Data, "missing CSV column '" + std::string(name) + "'");
}

}  // namespace

IngestResult read_events(std::istream& in, Schema schema, const std::optional<GeoBounds>& city) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::Data, "event CSV has no header");
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const auto header = csv::split(line);

    std::size_t c_user = 0;
    std::size_t c_time = 0;
    std::size_t c_lat = 0;
    std::size_t c_lon = 0;
    if (schema == Schema::A) {
        c_user = column(header, "user_id");
        c_time = column(header, "timestamp_iso8601");
        c_lat = column(header, "lat");
        c_lon = column(header, "lon");
    } else {
        c_time = column(header, "tpep_pickup_datetime");
        c_lat = column(header, "pickup_latitude");
        c_lon = column(header, "pickup_longitude");
    }
    const std::size_t width = std::max({c_user, c_time, c_lat, c_lon}) + 1;

    IngestResult out;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto f = csv::split(line);
        if (f.size() < width) {
            ++out.malformed;
            continue;
        }
        Event e;
        try {
            e.timestamp = csv::parse_iso8601(f[c_time]);
            e.where = {csv::parse_double(f[c_lat]), csv::parse_double(f[c_lon])};
        } catch (const Error&) {
            ++out.malformed;
            continue;
        }
        // Missing GPS fixes are recorded as (0, 0) in taxi trip exports.
        if (std::abs(e.where.lat) > 90.0 || std::abs(e.where.lon) > 180.0 ||
            (e.where.lat == 0.0 && e.where.lon == 0.0)) {
            ++out.malformed;
            continue;
        }
        if (city && !city->contains(e.where)) {
            ++out.out_of_bounds;
            continue;
        }
        if (schema == Schema::A && !f[c_user].empty()) {
            e.user_id = f[c_user];
        }
        out.events.push_back(std::move(e));
    }
    return out;
}

void write_events(std::ostream& out, std::span<const Event> events) {
    out << "user_id,timestamp_iso8601,lat,lon\n";
    char buf[64];
    for (const auto& e : events) {
        out << csv::escape(e.user_id.value_or("")) << ',' << csv::format_iso8601(e.timestamp);
        std::snprintf(buf, sizeof buf, ",%.7f,%.7f\n", e.where.lat, e.where.lon);
        out << buf;
    }
}

std::optional<std::size_t> TimeGrid::bin_of(std::int64_t t) const {
    if (t < start || t >= end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>((t - start) / period_seconds());
}

bool valid_period(int minutes) { return minutes == 5 || minutes == 15 || minutes == 30 || minutes == 60; }

TimeGrid day_aligned_grid(std::int64_t first, std::int64_t last, int period_minutes) {
    require(valid_period(period_minutes), ErrorKind::Config, "sampling period must be 5, 15, 30 or 60 minutes");
    require(last >= first, ErrorKind::Data, "empty time span");
    const auto floor_day = [](std::int64_t t) {
        std::int64_t d = t / 86400;
        if (t % 86400 < 0) {
            --d;
        }
        return d;
    };
    const std::int64_t d0 = floor_day(first);
    const std::int64_t d1 = floor_day(last) + 1;
    TimeGrid g;
    g.start = d0 * 86400;
    g.period_minutes = period_minutes;
    g.n_bins = static_cast<std::size_t>((d1 - d0) * 1440 / period_minutes);
    return g;
}

double BoxCox::forward(double y) const {
    if (lambda == 0.0) {
        return std::log(y + 1.0);
    }
    return (std::pow(y + 1.0, lambda) - 1.0) / lambda;
}

double BoxCox::inverse(double z) const {
    if (lambda == 0.0) {
        return std::exp(z) - 1.0;
    }
    const double base = lambda * z + 1.0;
    if (base <= 0.0) {
        // Outside the transform's range; the nearest attainable value.
        return lambda > 0.0 ? -1.0 : std::numeric_limits<double>::infinity();
    }
    return std::pow(base, 1.0 / lambda) - 1.0;
}

double boxcox_auto_lambda(std::span<const double> training) {
    require(!training.empty(), ErrorKind::Domain, "box-cox: empty training series");
    double log_jacobian = 0.0;
    for (double y : training) {
        require(y >= 0.0, ErrorKind::Domain, "box-cox: negative value");
        log_jacobian += std::log(y + 1.0);
    }
    const auto n = static_cast<double>(training.size());
    double best_lambda = 1.0;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 10; ++i) {
        const BoxCox bc{i / 10.0};
        double mean = 0.0;
        for (double y : training) {
            mean += bc.forward(y);
        }
        mean /= n;
        double var = 0.0;
        for (double y : training) {
            const double d = bc.forward(y) - mean;
            var += d * d;
        }
        var /= n;
        if (!(var > 0.0)) {
            return 1.0;
        }
        const double ll = -0.5 * n * std::log(var) + (bc.lambda - 1.0) * log_jacobian;
        if (ll > best_ll) {
            best_ll = ll;
            best_lambda = bc.lambda;
        }
    }
    return best_lambda;
}

Series boxcox(const Series& series, double lambda) {
    require(lambda >= -1.0 && lambda <= 2.0, ErrorKind::Domain, "box-cox lambda must be in [-1, 2]");
    require(!series.transform, ErrorKind::Domain, "series is already transformed");
    Series out = series;
    const BoxCox bc{lambda};
    for (double& v : out.values) {
        require(v >= 0.0, ErrorKind::Domain, "box-cox: negative value");
        v = bc.forward(v);
    }
    out.transform = bc;
    return out;
}

Series inverse_boxcox(const Series& series) {
    Series out = series;
    if (!series.transform) {
        return out;
    }
    for (double& v : out.values) {
        v = series.transform->inverse(v);
    }
    out.transform.reset();
    return out;
}

DedupResult dedup(std::span<const Event> events, const std::function<std::string(const Event&)>& partition_of,
                  int window_minutes) {
    require(window_minutes >= 0, ErrorKind::Domain, "dedup window must be nonnegative");
    std::vector<std::size_t> order(events.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return events[a].timestamp < events[b].timestamp; });

    const std::int64_t window = static_cast<std::int64_t>(window_minutes) * 60;
    std::unordered_map<std::string, std::int64_t> last_kept;
    DedupResult out;
    out.kept.reserve(events.size());
    for (std::size_t idx : order) {
        const Event& e = events[idx];
        if (!e.user_id) {
            out.kept.push_back(e);
            continue;
        }
        std::string key = *e.user_id;
        key.push_back('\x1f');
        key += partition_of(e);
        const auto it = last_kept.find(key);
        if (it != last_kept.end() && e.timestamp - it->second < window) {
            ++out.dropped;
            continue;
        }
        last_kept[std::move(key)] = e.timestamp;
        out.kept.push_back(e);
    }
    return out;
}

Aggregation aggregate(std::span<const Event> events, std::span<const std::optional<std::size_t>> assignment,
                      std::span<const std::string> ids, std::span<const double> areas_km2, const TimeGrid& grid) {
    require(assignment.size() == events.size(), ErrorKind::Domain, "aggregate: assignment size mismatch");
    require(ids.size() == areas_km2.size(), ErrorKind::Domain, "aggregate: ids/areas size mismatch");
    std::vector<std::vector<std::uint32_t>> counts(ids.size(), std::vector<std::uint32_t>(grid.n_bins, 0));
    Aggregation out;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (!assignment[i]) {
            ++out.stats.out_of_bounds;
            continue;
        }
        const auto bin = grid.bin_of(events[i].timestamp);
        if (!bin) {
            ++out.stats.out_of_window;
            continue;
        }
        ++counts[*assignment[i]][*bin];
        ++out.stats.kept;
    }
    out.series.reserve(ids.size());
    for (std::size_t p = 0; p < ids.size(); ++p) {
        require(areas_km2[p] > 0.0, ErrorKind::Data, "partition '" + ids[p] + "' has zero area");
        Series s;
        s.partition_id = ids[p];
        s.area_km2 = areas_km2[p];
        s.values.resize(grid.n_bins);
        for (std::size_t b = 0; b < grid.n_bins; ++b) {
            s.values[b] = counts[p][b] / areas_km2[p];
        }
        out.series.push_back(std::move(s));
    }
    return out;
}

Aggregation aggregate_geohash(std::span<const Event> events, int level, const TimeGrid& grid,
                              std::span<const std::string> extra_cells) {
    std::vector<std::string> codes;
    codes.reserve(events.size());
    std::map<std::string, std::size_t> index;
    for (const auto& e : events) {
        codes.push_back(geohash::encode(e.where.lat, e.where.lon, level).code);
        index.emplace(codes.back(), 0);
    }
    for (const auto& c : extra_cells) {
        require(static_cast<int>(c.size()) == level, ErrorKind::Domain, "extra geohash cell has the wrong level");
        index.emplace(c, 0);
    }
    std::vector<std::string> ids;
    std::vector<double> areas;
    for (auto& [code, i] : index) {
        i = ids.size();
        ids.push_back(code);
        areas.push_back(geohash::cell_area_km2(geohash::decode(code)));
    }
    std::vector<std::optional<std::size_t>> assignment(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        assignment[i] = index.at(codes[i]);
    }
    return aggregate(events, assignment, ids, areas, grid);
}

std::string voronoi_id(std::size_t index) { return "v" + std::to_string(index); }

Aggregation aggregate_voronoi(std::span<const Event> events, const voronoi::Diagram& diagram, const TimeGrid& grid) {
    std::vector<std::optional<std::size_t>> assignment(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (diagram.bounds().contains(events[i].where)) {
            assignment[i] = diagram.locate(events[i].where);
        }
    }
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < diagram.size(); ++i) {
        ids.push_back(voronoi_id(i));
    }
    return aggregate(events, assignment, ids, diagram.areas(), grid);
}

void write_series_csv(std::ostream& out, std::span<const Series> series, const TimeGrid& grid) {
    out << "partition_id,bin_start_iso8601,d_norm\n";
    for (const auto& s : series) {
        const std::string id = csv::escape(s.partition_id);
        for (std::size_t b = 0; b < s.values.size(); ++b) {
            out << id << ',' << csv::format_iso8601(grid.bin_start(b)) << ',' << csv::num(s.values[b]) << '\n';
        }
    }
}

}  // namespace hybridtess::demand
