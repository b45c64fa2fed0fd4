// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"
#include "geohash.hpp"
#include "metrics.hpp"

namespace hybridtess::experiment {

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        return csv::parse_double(v);
    } catch (const Error&) {
        fail(ErrorKind::Config, "'" + key + "' expects a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    require(d == std::floor(d), ErrorKind::Config, "'" + key + "' expects an integer, got '" + v + "'");
    return static_cast<long long>(d);
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) {
        out.push_back(to_double(key, s));
    }
    require(!out.empty(), ErrorKind::Config, "'" + key + "' expects a non-empty list");
    return out;
}

// Per-cell error contribution at one step for the configured metric; nullopt
// when the cell has no defined contribution (MASE with a zero scale).
std::optional<double> contribution(Metric metric, double actual, double forecast, double mase_scale) {
    if (metric == Metric::Smape) {
        return metrics::smape_term(actual, forecast);
    }
    if (mase_scale <= 0.0) {
        return std::nullopt;
    }
    return std::abs(actual - forecast) / mase_scale;
}

// Evaluates f(0..n-1) on a few worker threads; results keep index order. The
// first exception (by index) is rethrown.
template <typename F>
auto parallel_map(std::size_t n, F&& f) {
    using R = decltype(f(std::size_t{0}));
    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < threads; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    std::vector<R> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) {
            std::rethrow_exception(errors[i]);
        }
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

std::string stage_label(const std::string& stage, const Error& e) { return stage + ": " + e.what(); }

template <typename F>
auto staged(const std::string& stage, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.kind(), stage_label(stage, e));
    }
}

}  // namespace

std::string metric_name(Metric m) { return m == Metric::Smape ? "smape" : "mase"; }

Config::Config() {
    for (const char* name : {"snaive", "hw", "stl-ses", "stl-ar"}) {
        candidates.push_back(models::Spec::parse(name));
    }
}

void Config::set(const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string v = trim(raw_value);
    if (key == "input") {
        input = v;
    } else if (key == "schema") {
        require(v == "a" || v == "b" || v == "A" || v == "B", ErrorKind::Config, "schema must be a or b");
        schema = (v == "a" || v == "A") ? demand::Schema::A : demand::Schema::B;
    } else if (key == "geometry") {
        require(v == "radial" || v == "linear", ErrorKind::Config, "geometry must be radial or linear");
        city.geometry = v == "radial" ? synth::Geometry::Radial : synth::Geometry::Linear;
    } else if (key == "city_centre" || key == "city_center") {
        const auto c = to_doubles(key, v);
        require(c.size() == 2, ErrorKind::Config, "city_centre expects lat,lon");
        city.centre = {c[0], c[1]};
    } else if (key == "hotspots") {
        city.num_hotspots = static_cast<std::size_t>(to_int(key, v));
    } else if (key == "radius_km") {
        city.radius_km = to_double(key, v);
    } else if (key == "scatter_km") {
        city.scatter_km = to_double(key, v);
    } else if (key == "mean_rate") {
        city.mean_rate = to_double(key, v);
    } else if (key == "daily_amplitude") {
        city.daily_amplitude = to_double(key, v);
    } else if (key == "weekly_amplitude") {
        city.weekly_amplitude = to_double(key, v);
    } else if (key == "users") {
        city.users = static_cast<std::size_t>(to_int(key, v));
    } else if (key == "repeat_probability") {
        city.repeat_probability = to_double(key, v);
    } else if (key == "span_days") {
        span_days = static_cast<int>(to_int(key, v));
    } else if (key == "regime_day") {
        regime_day = v == "none" ? -1.0 : to_double(key, v);
    } else if (key == "regime_scatter") {
        regime_scatter = to_double(key, v);
    } else if (key == "bbox") {
        if (v == "auto") {
            bbox.reset();
        } else {
            const auto b = to_doubles(key, v);
            require(b.size() == 4, ErrorKind::Config, "bbox expects lat_min,lat_max,lon_min,lon_max");
            bbox = GeoBounds{b[0], b[1], b[2], b[3]};
        }
    } else if (key == "k") {
        const auto kk = to_int(key, v);
        require(kk >= 1, ErrorKind::Config, "k must be positive");
        k = static_cast<std::size_t>(kk);
    } else if (key == "geohash_level") {
        geohash_level = static_cast<int>(to_int(key, v));
    } else if (key == "periods" || key == "sampling_period" || key == "period") {
        periods.clear();
        for (double p : to_doubles(key, v)) {
            periods.push_back(static_cast<int>(p));
        }
    } else if (key == "validation_days") {
        validation_days = static_cast<int>(to_int(key, v));
    } else if (key == "test_days") {
        test_days = static_cast<int>(to_int(key, v));
    } else if (key == "candidates") {
        candidates.clear();
        for (const auto& name : split_list(v)) {
            candidates.push_back(models::Spec::parse(name));
        }
    } else if (key == "metric") {
        require(v == "smape" || v == "mase", ErrorKind::Config, "metric must be smape or mase");
        metric = v == "smape" ? Metric::Smape : Metric::Mase;
    } else if (key == "beta_grid") {
        beta_grid = to_doubles(key, v);
    } else if (key == "gamma_grid") {
        gamma_grid = to_doubles(key, v);
    } else if (key == "seed") {
        seed = static_cast<std::uint64_t>(to_int(key, v));
    } else if (key == "kmeans_sample") {
        kmeans_sample = static_cast<std::size_t>(to_int(key, v));
    } else if (key == "kmeans_max_iter") {
        kmeans_max_iter = static_cast<int>(to_int(key, v));
    } else if (key == "kmeans_tol") {
        kmeans_tol = to_double(key, v);
    } else if (key == "dedup_window") {
        dedup_window = static_cast<int>(to_int(key, v));
    } else if (key == "boxcox") {
        if (v == "auto") {
            boxcox = true;
            boxcox_lambda.reset();
        } else if (v == "none") {
            boxcox = false;
            boxcox_lambda.reset();
        } else {
            boxcox = true;
            boxcox_lambda = to_double(key, v);
        }
    } else if (key == "out" || key == "out_dir") {
        out_dir = v;
    } else {
        fail(ErrorKind::Config, "unknown config key '" + key + "'");
    }
}

void Config::load(std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        require(eq != std::string::npos, ErrorKind::Config,
                "config line " + std::to_string(lineno) + ": expected key=value");
        set(line.substr(0, eq), line.substr(eq + 1));
    }
}

void Config::load_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::Config, "cannot open config file '" + path + "'");
    load(in);
}

void Config::validate() const {
    require(k >= 1, ErrorKind::Config, "k must be positive");
    require(geohash_level >= 1 && geohash_level <= geohash::kMaxLevel, ErrorKind::Config,
            "geohash_level must be in [1, 12]");
    require(!periods.empty(), ErrorKind::Config, "no sampling periods");
    for (int p : periods) {
        require(demand::valid_period(p), ErrorKind::Config, "sampling periods must be 5, 15, 30 or 60 minutes");
    }
    require(validation_days >= 1 && test_days >= 1, ErrorKind::Config, "validation and test need at least a day");
    require(!beta_grid.empty() && !gamma_grid.empty(), ErrorKind::Config, "empty hedge grid");
    for (double b : beta_grid) {
        require(b >= 0.0 && b <= 1.0, ErrorKind::Config, "beta grid values must be in [0, 1]");
    }
    for (double g : gamma_grid) {
        require(g >= 0.0 && g <= 1.0, ErrorKind::Config, "gamma grid values must be in [0, 1]");
    }
    require(dedup_window >= 0, ErrorKind::Config, "dedup_window must be nonnegative");
    require(kmeans_sample >= k, ErrorKind::Config, "kmeans_sample must be at least k");
    require(!boxcox_lambda || (*boxcox_lambda >= -1.0 && *boxcox_lambda <= 2.0), ErrorKind::Config,
            "box-cox lambda must be in [-1, 2]");
    if (input.empty()) {
        require(span_days >= 7, ErrorKind::Config, "synthetic span must be at least 7 days");
        require(span_days >= validation_days + test_days + 2, ErrorKind::Config,
                "span leaves fewer than two training days");
        require(city.scatter_km > 0.0 && city.mean_rate >= 0.0, ErrorKind::Config, "invalid synthetic city");
    }
}

double StrategyRun::mean_test_error() const {
    if (test_errors.empty()) {
        return 0.0;
    }
    return std::accumulate(test_errors.begin(), test_errors.end(), 0.0) / static_cast<double>(test_errors.size());
}

double PeriodRun::switches_per_day() const { return static_cast<double>(hybrid.switches) / test_days; }

synth::CitySpec synthetic_spec(const Config& config) {
    synth::CitySpec spec = config.city;
    if (config.regime_day >= 0.0) {
        spec.regime = synth::RegimeSwitch{static_cast<std::int64_t>(config.regime_day * 86400.0), config.regime_scatter};
    }
    return spec;
}

std::vector<demand::Event> load_events(const Config& config, IngestStats* stats) {
    std::vector<demand::Event> events;
    IngestStats local;
    if (config.input.empty()) {
        events = synth::generate(synthetic_spec(config), config.span_days, config.seed);
    } else {
        std::ifstream in(config.input);
        require(in.good(), ErrorKind::Data, "cannot open input '" + config.input + "'");
        auto r = demand::read_events(in, config.schema, config.bbox);
        events = std::move(r.events);
        local.malformed = r.malformed;
        local.out_of_bounds = r.out_of_bounds;
    }
    if (config.input.empty() && config.bbox) {
        const auto before = events.size();
        std::erase_if(events, [&](const demand::Event& e) { return !config.bbox->contains(e.where); });
        local.out_of_bounds = before - events.size();
    }
    local.events = events.size() + local.out_of_bounds;
    if (stats != nullptr) {
        *stats = local;
    }
    return events;
}

demand::TimeGrid grid_for(std::span<const demand::Event> events, int period_minutes) {
    require(!events.empty(), ErrorKind::Data, "no events to aggregate");
    std::int64_t lo = events.front().timestamp;
    std::int64_t hi = lo;
    for (const auto& e : events) {
        lo = std::min(lo, e.timestamp);
        hi = std::max(hi, e.timestamp);
    }
    return demand::day_aligned_grid(lo, hi, period_minutes);
}

Tessellation tessellate(const Config& config, std::span<const demand::Event> events, const demand::TimeGrid& grid) {
    require(!events.empty(), ErrorKind::Data, "no events to tessellate");
    const std::size_t per_day = grid.bins_per_day();
    const std::size_t days = grid.n_bins / per_day;
    const auto held_out = static_cast<std::size_t>(config.validation_days + config.test_days);
    require(days >= held_out + 1, ErrorKind::Data, "data span too short for the validation/test split");
    const std::int64_t train_end = grid.bin_start((days - held_out) * per_day);

    std::vector<LatLon> all;
    all.reserve(events.size());
    std::vector<LatLon> training;
    for (const auto& e : events) {
        all.push_back(e.where);
        if (e.timestamp < train_end) {
            training.push_back(e.where);
        }
    }
    const GeoBounds bounds = config.bbox ? *config.bbox : GeoBounds::around(all, 0.02);
    const Projection projection = Projection::about_mean(all);

    if (training.size() > config.kmeans_sample) {
        std::mt19937_64 rng(config.seed ^ 0x5851f42d4c957f2dULL);
        std::shuffle(training.begin(), training.end(), rng);
        training.resize(config.kmeans_sample);
    }
    require(training.size() >= config.k, ErrorKind::Data,
            "fewer training events (" + std::to_string(training.size()) + ") than clusters");
    kmeans::Options opt;
    opt.seed = config.seed;
    opt.max_iter = config.kmeans_max_iter;
    opt.tol = config.kmeans_tol;
    auto clusters = kmeans::fit(training, config.k, projection, opt);

    voronoi::Diagram diagram(clusters.centroids, bounds, projection);
    std::vector<std::string> cells;
    for (const auto& c : clusters.centroids) {
        cells.push_back(geohash::encode(c.lat, c.lon, config.geohash_level).code);
    }
    return {bounds, std::move(clusters), std::move(diagram), std::move(cells)};
}

std::vector<StrategyDemand> build_demand(const Config& config, std::span<const demand::Event> events,
                                         const Tessellation& tess, const demand::TimeGrid& grid) {
    std::vector<StrategyDemand> out;

    // Voronoi: every cell is evaluated.
    {
        const auto& d = tess.diagram;
        auto dd = demand::dedup(
            events,
            [&](const demand::Event& e) {
                return d.bounds().contains(e.where) ? demand::voronoi_id(d.locate(e.where)) : std::string("-");
            },
            config.dedup_window);
        StrategyDemand s;
        s.name = "voronoi";
        s.dedup_dropped = dd.dropped;
        s.aggregation = demand::aggregate_voronoi(dd.kept, d, grid);
        s.evaluated.resize(d.size());
        std::iota(s.evaluated.begin(), s.evaluated.end(), std::size_t{0});
        out.push_back(std::move(s));
    }
    // Geohash: the cells that hold a centroid are evaluated; the rest are aggregated only.
    {
        const int level = config.geohash_level;
        auto dd = demand::dedup(
            events, [&](const demand::Event& e) { return geohash::encode(e.where.lat, e.where.lon, level).code; },
            config.dedup_window);
        StrategyDemand s;
        s.name = "geohash";
        s.dedup_dropped = dd.dropped;
        s.aggregation = demand::aggregate_geohash(dd.kept, level, grid, tess.centroid_cells);
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < s.aggregation.series.size(); ++i) {
            index.emplace(s.aggregation.series[i].partition_id, i);
        }
        std::vector<std::size_t> chosen;
        for (const auto& c : tess.centroid_cells) {
            chosen.push_back(index.at(c));
        }
        std::sort(chosen.begin(), chosen.end());
        chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
        s.evaluated = std::move(chosen);
        out.push_back(std::move(s));
    }
    return out;
}

StrategyRun forecast_strategy(const Config& config, const StrategyDemand& sd, const demand::TimeGrid& grid) {
    const std::size_t per_day = grid.bins_per_day();
    const std::size_t n = grid.n_bins;
    const std::size_t n_test = static_cast<std::size_t>(config.test_days) * per_day;
    const std::size_t n_val = static_cast<std::size_t>(config.validation_days) * per_day;
    require(n > n_test + n_val + 2 * per_day, ErrorKind::Data, "fewer than two training days");
    const std::size_t n_train = n - n_test - n_val;

    models::FitConfig fc;
    fc.season = per_day;
    fc.baseline_season = per_day;
    fc.baseline_seasons = 7;
    fc.tbats_periods = {per_day};
    fc.tbats_harmonics = {std::min<std::size_t>(3, per_day / 2)};
    if (n_train >= 14 * per_day) {
        fc.tbats_periods.push_back(7 * per_day);
        fc.tbats_harmonics.push_back(2);
    }

    struct CellOutcome {
        CellReport report;
        std::vector<double> forecast;
        double scale = 0.0;
    };
    const auto model_cell = [&](std::size_t idx) {
        const demand::Series& series = sd.aggregation.series[idx];
        const std::span<const double> y(series.values);
        const auto training = y.subspan(0, n_train);

        std::optional<demand::BoxCox> transform;
        if (config.boxcox) {
            transform = demand::BoxCox{config.boxcox_lambda ? *config.boxcox_lambda
                                                            : demand::boxcox_auto_lambda(training)};
        }
        std::vector<double> z(y.begin(), y.end());
        if (transform) {
            for (double& v : z) {
                v = transform->forward(v);
            }
        }
        const std::span<const double> zs(z);
        const auto sel = models::select_model(zs.subspan(0, n_train), zs.subspan(n_train, n_val), config.candidates,
                                              fc, transform);
        CellOutcome out;
        out.forecast = models::to_demand_scale(sel.model->one_step(zs, n_train), transform);
        out.scale = metrics::seasonal_naive_scale(training, per_day);

        CellReport& cell = out.report;
        cell.partition_id = series.partition_id;
        cell.strategy = sd.name;
        cell.model_kind = sel.model->name();
        cell.validation_smape = sel.validation_smape;
        cell.zero_demand = std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; });
        const auto actual_test = y.subspan(n_train + n_val, n_test);
        const std::span<const double> fc_test(out.forecast.data() + n_val, n_test);
        try {
            cell.smape = metrics::smape(actual_test, fc_test);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::UndefinedMetric) {
                throw;
            }
        }
        if (out.scale > 0.0) {
            cell.mase = metrics::mase(actual_test, fc_test, training, per_day);
        }
        return out;
    };
    const auto outcomes = parallel_map(sd.evaluated.size(), [&](std::size_t i) { return model_cell(sd.evaluated[i]); });

    StrategyRun run;
    run.name = sd.name;
    std::vector<double> val_sum(n_val, 0.0);
    std::vector<std::size_t> val_count(n_val, 0);
    std::vector<double> test_sum(n_test, 0.0);
    std::vector<std::size_t> test_count(n_test, 0);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        const auto& y = sd.aggregation.series[sd.evaluated[i]].values;
        for (std::size_t t = 0; t < n_val + n_test; ++t) {
            const auto c = contribution(config.metric, y[n_train + t], o.forecast[t], o.scale);
            if (!c) {
                continue;
            }
            if (t < n_val) {
                val_sum[t] += *c;
                ++val_count[t];
            } else {
                test_sum[t - n_val] += *c;
                ++test_count[t - n_val];
            }
        }
        if (o.report.zero_demand) {
            ++run.zero_demand_cells;
        }
        run.cells.push_back(o.report);
    }

    const auto finish = [](const std::vector<double>& sum, const std::vector<std::size_t>& count) {
        std::vector<double> out(sum.size(), 0.0);
        for (std::size_t t = 0; t < sum.size(); ++t) {
            out[t] = count[t] > 0 ? sum[t] / static_cast<double>(count[t]) : 0.0;
        }
        return out;
    };
    run.validation_errors = finish(val_sum, val_count);
    run.test_errors = finish(test_sum, test_count);
    return run;
}


PeriodRun forecast_period(const Config& config, std::span<const demand::Event> events, const Tessellation& tess,
                          int period_minutes) {
    const auto grid = grid_for(events, period_minutes);
    const auto demand = staged("aggregate", [&] { return build_demand(config, events, tess, grid); });
    PeriodRun pr;
    pr.period_minutes = period_minutes;
    pr.test_days = config.test_days;
    for (const auto& sd : demand) {
        pr.strategies.push_back(staged("forecast", [&] { return forecast_strategy(config, sd, grid); }));
    }
    std::vector<std::vector<double>> cell_errors;
    for (const auto& s : pr.strategies) {
        std::vector<double> e;
        for (const auto& c : s.cells) {
            const auto v = config.metric == Metric::Smape ? c.smape : c.mase;
            if (v) {
                e.push_back(*v);
            }
        }
        cell_errors.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < pr.strategies.size(); ++i) {
        for (std::size_t j = i + 1; j < pr.strategies.size(); ++j) {
            if (cell_errors[i].empty() || cell_errors[j].empty()) {
                continue;
            }
            const auto ks = metrics::ks_two_sample(cell_errors[i], cell_errors[j]);
            pr.ks.push_back({pr.strategies[i].name, pr.strategies[j].name, ks.statistic, ks.p_value});
        }
    }
    return pr;
}

void hedge_period(const Config& config, PeriodRun& pr) {
    std::vector<std::vector<double>> validation;
    std::vector<std::vector<double>> test;
    for (const auto& s : pr.strategies) {
        validation.push_back(s.validation_errors);
        test.push_back(s.test_errors);
    }
    pr.tuned = staged("hedge", [&] { return hedge::tune(validation, config.beta_grid, config.gamma_grid); });
    pr.hybrid = staged("hedge", [&] { return hedge::run(test, pr.tuned.beta, pr.tuned.gamma); });
}

void write_expert_errors(std::ostream& out, std::span<const PeriodRun> periods) {
    require(!periods.empty(), ErrorKind::Data, "no periods to write");
    out << "sampling_period_min,split,t";
    for (const auto& s : periods.front().strategies) {
        out << ',' << s.name;
    }
    out << '\n';
    for (const auto& p : periods) {
        const auto& first = p.strategies.front();
        for (std::size_t t = 0; t < first.validation_errors.size(); ++t) {
            out << p.period_minutes << ",validation," << t;
            for (const auto& s : p.strategies) {
                out << ',' << csv::num(s.validation_errors[t]);
            }
            out << '\n';
        }
        for (std::size_t t = 0; t < first.test_errors.size(); ++t) {
            out << p.period_minutes << ",test," << t;
            for (const auto& s : p.strategies) {
                out << ',' << csv::num(s.test_errors[t]);
            }
            out << '\n';
        }
    }
}

std::vector<PeriodRun> read_expert_errors(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::Data, "empty expert error file");
    const auto header = csv::split(line);
    require(header.size() >= 5 && header[0] == "sampling_period_min" && header[1] == "split" && header[2] == "t",
            ErrorKind::Data, "unexpected expert error header");
    std::vector<PeriodRun> periods;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto f = csv::split(line);
        require(f.size() == header.size(), ErrorKind::Data, "ragged expert error row");
        const int period = static_cast<int>(csv::parse_double(f[0]));
        if (periods.empty() || periods.back().period_minutes != period) {
            PeriodRun p;
            p.period_minutes = period;
            for (std::size_t i = 3; i < header.size(); ++i) {
                p.strategies.push_back({});
                p.strategies.back().name = header[i];
            }
            periods.push_back(std::move(p));
        }
        require(f[1] == "validation" || f[1] == "test", ErrorKind::Data, "split must be validation or test");
        for (std::size_t i = 3; i < header.size(); ++i) {
            auto& s = periods.back().strategies[i - 3];
            (f[1] == "validation" ? s.validation_errors : s.test_errors).push_back(csv::parse_double(f[i]));
        }
    }
    require(!periods.empty(), ErrorKind::Data, "expert error file has no rows");
    return periods;
}

void write_centroids(std::ostream& out, const Tessellation& tess, int geohash_level) {
    out << "cluster_id,lat,lon,density,geohash\n";
    const auto& c = tess.clusters;
    for (std::size_t i = 0; i < c.k(); ++i) {
        out << i << ',' << csv::num(c.centroids[i].lat) << ',' << csv::num(c.centroids[i].lon) << ','
            << c.density[i] << ',' << geohash::encode(c.centroids[i].lat, c.centroids[i].lon, geohash_level).code
            << '\n';
    }
}

ReportBundle run(const Config& config, const PeriodCallback& on_period) {
    staged("config", [&] { config.validate(); });
    IngestStats stats;
    auto events = staged("ingest", [&] { return load_events(config, &stats); });
    return run(config, std::move(events), stats, on_period);
}

ReportBundle run(const Config& config, std::vector<demand::Event> events, IngestStats stats,
                 const PeriodCallback& on_period) {
    staged("config", [&] { config.validate(); });
    ReportBundle bundle;
    bundle.metric = metric_name(config.metric);
    bundle.seed = config.seed;
    bundle.k = config.k;
    bundle.geohash_level = config.geohash_level;
    bundle.ingest = stats;
    require(!events.empty(), ErrorKind::Data, "ingest: no events");

    const auto coarse = staged("tessellate", [&] { return grid_for(events, config.periods.front()); });
    const auto tess = staged("tessellate", [&] { return tessellate(config, events, coarse); });
    bundle.kmeans_objective = tess.clusters.objective;

    for (int period : config.periods) {
        PeriodRun pr = forecast_period(config, events, tess, period);
        hedge_period(config, pr);
        bundle.periods.push_back(std::move(pr));
        if (on_period) {
            on_period(bundle);
        }
    }
    return bundle;
}

ReportBundle run_to_dir(const Config& config, const std::string& dir) {
    const std::filesystem::path root(dir);
    std::error_code ec;
    std::filesystem::remove(root / "FAILED", ec);
    const auto flush = [&](const ReportBundle& b) {
        write_report(b, dir);
        std::ofstream json_out(root / "bundle.json", std::ios::binary);
        require(json_out.good(), ErrorKind::Io, "cannot write bundle.json");
        json_out << to_json(b) << '\n';
    };
    try {
        const auto bundle = run(config, flush);
        flush(bundle);
        return bundle;
    } catch (const Error& e) {
        std::filesystem::create_directories(root, ec);
        std::ofstream marker(root / "FAILED", std::ios::binary);
        const std::string what = e.what();
        const auto colon = what.find(": ");
        marker << "stage=" << (colon == std::string::npos ? "unknown" : what.substr(0, colon)) << '\n'
               << "error=" << kind_name(e.kind()) << '\n'
               << "message=" << what << '\n';
        throw;
    }
}

// ---------------------------------------------------------------- reports

namespace {

std::string opt_num(const std::optional<double>& v) { return v ? csv::num(*v) : std::string(); }

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    require(out.good(), ErrorKind::Io, "cannot write '" + p.string() + "'");
    return out;
}

}  // namespace

void write_report(const ReportBundle& bundle, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec && std::filesystem::is_directory(dir), ErrorKind::Io, "cannot create output directory '" + dir + "'");
    const std::filesystem::path root(dir);

    {
        auto out = open_out(root / "summary.csv");
        out << "sampling_period_min,strategy,metric,mean_error,beta,gamma,switches,switches_per_day,cells,"
               "zero_demand_cells\n";
        for (const auto& p : bundle.periods) {
            for (const auto& s : p.strategies) {
                out << p.period_minutes << ',' << s.name << ',' << bundle.metric << ',' << csv::num(s.mean_test_error())
                    << ',' << csv::num(p.tuned.beta) << ',' << csv::num(p.tuned.gamma) << ",,," << s.cells.size()
                    << ',' << s.zero_demand_cells << '\n';
            }
            out << p.period_minutes << ",hybrid," << bundle.metric << ',' << csv::num(p.hybrid.mean_hybrid_error())
                << ',' << csv::num(p.tuned.beta) << ',' << csv::num(p.tuned.gamma) << ',' << p.hybrid.switches << ','
                << csv::num(p.switches_per_day()) << ",,\n";
        }
    }
    for (std::size_t i = 0; i < bundle.periods.size(); ++i) {
        const auto& p = bundle.periods[i];
        if (i == 0) {
            auto out = open_out(root / "trace.csv");
            hedge::write_trace_csv(out, p.hybrid.trace);
        }
        if (bundle.periods.size() > 1) {
            auto out = open_out(root / ("trace_" + std::to_string(p.period_minutes) + "min.csv"));
            hedge::write_trace_csv(out, p.hybrid.trace);
        }
    }
    {
        auto out = open_out(root / "per_cell.csv");
        out << "partition_id,strategy,model_kind,smape,mase,sampling_period_min,validation_smape,zero_demand\n";
        for (const auto& p : bundle.periods) {
            for (const auto& s : p.strategies) {
                for (const auto& c : s.cells) {
                    out << csv::escape(c.partition_id) << ',' << c.strategy << ',' << csv::escape(c.model_kind) << ','
                        << opt_num(c.smape) << ',' << opt_num(c.mase) << ',' << p.period_minutes << ','
                        << csv::num(c.validation_smape) << ',' << (c.zero_demand ? 1 : 0) << '\n';
                }
            }
        }
    }
    {
        auto out = open_out(root / "ecdf.csv");
        out << "sampling_period_min,row,strategy,other_strategy,x,ecdf,ks_statistic,ks_p_value\n";
        for (const auto& p : bundle.periods) {
            for (const auto& s : p.strategies) {
                std::vector<double> e;
                for (const auto& c : s.cells) {
                    const auto v = bundle.metric == "smape" ? c.smape : c.mase;
                    if (v) {
                        e.push_back(*v);
                    }
                }
                if (e.empty()) {
                    continue;
                }
                const metrics::Ecdf ecdf(e);
                const auto& xs = ecdf.sorted();
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    if (i + 1 < xs.size() && xs[i + 1] == xs[i]) {
                        continue;
                    }
                    out << p.period_minutes << ",ecdf," << s.name << ",," << csv::num(xs[i]) << ','
                        << csv::num(ecdf(xs[i])) << ",,\n";
                }
            }
            for (const auto& ks : p.ks) {
                out << p.period_minutes << ",ks," << ks.a << ',' << ks.b << ",,," << csv::num(ks.statistic) << ','
                    << csv::num(ks.p_value) << '\n';
            }
        }
    }
    {
        auto out = open_out(root / "cumulative.csv");
        out << "sampling_period_min,t,voronoi,geohash,hybrid\n";
        for (const auto& p : bundle.periods) {
            const auto& v = p.strategies[0].test_errors;
            const auto& g = p.strategies[1].test_errors;
            const auto& h = p.hybrid.hybrid_errors;
            double sv = 0.0;
            double sg = 0.0;
            double sh = 0.0;
            for (std::size_t t = 0; t < h.size(); ++t) {
                sv += v[t];
                sg += g[t];
                sh += h[t];
                const auto n = static_cast<double>(t + 1);
                out << p.period_minutes << ',' << t << ',' << csv::num(sv / n) << ',' << csv::num(sg / n) << ','
                    << csv::num(sh / n) << '\n';
            }
        }
    }
}

// ---------------------------------------------------------------- bundle (de)serialisation

namespace {

using nlohmann::json;

json opt_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
std::optional<double> opt_from_json(const json& j) {
    if (j.is_null()) {
        return std::nullopt;
    }
    return j.get<double>();
}

}  // namespace

std::string to_json(const ReportBundle& b) {
    json j;
    j["metric"] = b.metric;
    j["seed"] = b.seed;
    j["k"] = b.k;
    j["geohash_level"] = b.geohash_level;
    j["kmeans_objective"] = b.kmeans_objective;
    j["ingest"] = {{"events", b.ingest.events},
                   {"malformed", b.ingest.malformed},
                   {"out_of_bounds", b.ingest.out_of_bounds},
                   {"dedup_dropped_voronoi", b.ingest.dedup_dropped_voronoi},
                   {"dedup_dropped_geohash", b.ingest.dedup_dropped_geohash}};
    j["periods"] = json::array();
    for (const auto& p : b.periods) {
        json jp;
        jp["period_minutes"] = p.period_minutes;
        jp["test_days"] = p.test_days;
        jp["tuned"] = {{"beta", p.tuned.beta}, {"gamma", p.tuned.gamma}, {"mean_error", p.tuned.mean_error}};
        json trace = json::array();
        for (const auto& r : p.hybrid.trace) {
            trace.push_back({{"chosen", r.chosen}, {"errors", r.errors}, {"losses", r.losses}, {"weights", r.weights}});
        }
        jp["hybrid"] = {{"beta", p.hybrid.beta},         {"gamma", p.hybrid.gamma},
                        {"choices", p.hybrid.choices},   {"errors", p.hybrid.hybrid_errors},
                        {"weights", p.hybrid.weights},   {"switches", p.hybrid.switches},
                        {"trace", std::move(trace)}};
        jp["strategies"] = json::array();
        for (const auto& s : p.strategies) {
            json js;
            js["name"] = s.name;
            js["validation_errors"] = s.validation_errors;
            js["test_errors"] = s.test_errors;
            js["zero_demand_cells"] = s.zero_demand_cells;
            js["cells"] = json::array();
            for (const auto& c : s.cells) {
                js["cells"].push_back({{"partition_id", c.partition_id},
                                       {"strategy", c.strategy},
                                       {"model_kind", c.model_kind},
                                       {"smape", opt_to_json(c.smape)},
                                       {"mase", opt_to_json(c.mase)},
                                       {"validation_smape", c.validation_smape},
                                       {"zero_demand", c.zero_demand}});
            }
            jp["strategies"].push_back(std::move(js));
        }
        jp["ks"] = json::array();
        for (const auto& k : p.ks) {
            jp["ks"].push_back({{"a", k.a}, {"b", k.b}, {"statistic", k.statistic}, {"p_value", k.p_value}});
        }
        j["periods"].push_back(std::move(jp));
    }
    return j.dump(1);
}

ReportBundle from_json(const std::string& text) {
    ReportBundle b;
    try {
        const json j = json::parse(text);
        b.metric = j.at("metric").get<std::string>();
        b.seed = j.at("seed").get<std::uint64_t>();
        b.k = j.at("k").get<std::size_t>();
        b.geohash_level = j.at("geohash_level").get<int>();
        b.kmeans_objective = j.at("kmeans_objective").get<double>();
        const auto& ji = j.at("ingest");
        b.ingest = {ji.at("events").get<std::size_t>(), ji.at("malformed").get<std::size_t>(),
                    ji.at("out_of_bounds").get<std::size_t>(), ji.at("dedup_dropped_voronoi").get<std::size_t>(),
                    ji.at("dedup_dropped_geohash").get<std::size_t>()};
        for (const auto& jp : j.at("periods")) {
            PeriodRun p;
            p.period_minutes = jp.at("period_minutes").get<int>();
            p.test_days = jp.at("test_days").get<double>();
            p.tuned = {jp.at("tuned").at("beta").get<double>(), jp.at("tuned").at("gamma").get<double>(),
                       jp.at("tuned").at("mean_error").get<double>()};
            const auto& jh = jp.at("hybrid");
            p.hybrid.beta = jh.at("beta").get<double>();
            p.hybrid.gamma = jh.at("gamma").get<double>();
            p.hybrid.choices = jh.at("choices").get<std::vector<std::size_t>>();
            p.hybrid.hybrid_errors = jh.at("errors").get<std::vector<double>>();
            p.hybrid.weights = jh.at("weights").get<std::vector<std::vector<double>>>();
            p.hybrid.switches = jh.at("switches").get<std::size_t>();
            for (const auto& r : jh.at("trace")) {
                p.hybrid.trace.push_back({r.at("chosen").get<std::size_t>(), r.at("errors").get<std::vector<double>>(),
                                          r.at("losses").get<std::vector<double>>(),
                                          r.at("weights").get<std::vector<double>>()});
            }
            for (const auto& js : jp.at("strategies")) {
                StrategyRun s;
                s.name = js.at("name").get<std::string>();
                s.validation_errors = js.at("validation_errors").get<std::vector<double>>();
                s.test_errors = js.at("test_errors").get<std::vector<double>>();
                s.zero_demand_cells = js.at("zero_demand_cells").get<std::size_t>();
                for (const auto& jc : js.at("cells")) {
                    CellReport c;
                    c.partition_id = jc.at("partition_id").get<std::string>();
                    c.strategy = jc.at("strategy").get<std::string>();
                    c.model_kind = jc.at("model_kind").get<std::string>();
                    c.smape = opt_from_json(jc.at("smape"));
                    c.mase = opt_from_json(jc.at("mase"));
                    c.validation_smape = jc.at("validation_smape").get<double>();
                    c.zero_demand = jc.at("zero_demand").get<bool>();
                    s.cells.push_back(std::move(c));
                }
                p.strategies.push_back(std::move(s));
            }
            for (const auto& jk : jp.at("ks")) {
                p.ks.push_back({jk.at("a").get<std::string>(), jk.at("b").get<std::string>(),
                                jk.at("statistic").get<double>(), jk.at("p_value").get<double>()});
            }
            b.periods.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Data, std::string("malformed report bundle: ") + e.what());
    }
    return b;
}

}  // namespace hybridtess::experiment
