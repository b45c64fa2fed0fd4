// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridtess/hybridtess.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "csv.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "geohash.hpp"
#include "hedge.hpp"
#include "kmeans.hpp"
#include "metrics.hpp"
#include "synth.hpp"
#include "voronoi.hpp"

using namespace hybridtess;

struct ht_kmeans {
    kmeans::ClusterModel model;
};

struct ht_voronoi {
    voronoi::Diagram diagram;
};

struct ht_hedge {
    hedge::Hedge hedge;
    std::size_t experts;
};

struct ht_config {
    experiment::Config config;
};

struct ht_report {
    experiment::ReportBundle bundle;
};

namespace {

thread_local std::string last_error;

ht_status to_status(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Domain:
            return HT_ERR_DOMAIN;
        case ErrorKind::Parse:
            return HT_ERR_PARSE;
        case ErrorKind::UndefinedMetric:
            return HT_ERR_UNDEFINED_METRIC;
        case ErrorKind::Io:
            return HT_ERR_IO;
        case ErrorKind::Config:
            return HT_ERR_CONFIG;
        case ErrorKind::Data:
            return HT_ERR_DATA;
        case ErrorKind::Numeric:
            return HT_ERR_NUMERIC;
    }
    return HT_ERR_INTERNAL;
}

ht_status invalid(const char* what) {
    last_error = what;
    return HT_ERR_INVALID_ARGUMENT;
}

template <typename F>
ht_status guarded(F&& f) {
    try {
        f();
        return HT_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return to_status(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return HT_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return HT_ERR_INTERNAL;
    }
}

GeoBounds bounds_from(const double b[4]) { return {b[0], b[1], b[2], b[3]}; }

std::vector<LatLon> points_from(const double* lat, const double* lon, std::size_t n) {
    std::vector<LatLon> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = {lat[i], lon[i]};
    }
    return pts;
}

std::ofstream open_file(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::Io, "cannot write '" + path + "'");
    return out;
}

std::filesystem::path ensure_dir(const char* dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(std::filesystem::is_directory(dir), ErrorKind::Io, std::string("cannot create directory '") + dir + "'");
    return dir;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + csv::num(v[i]);
    }
    return s;
}

const experiment::StrategyRun* find_strategy(const experiment::PeriodRun& p, const std::string& name) {
    for (const auto& s : p.strategies) {
        if (s.name == name) {
            return &s;
        }
    }
    return nullptr;
}

}  // namespace

extern "C" {

const char* ht_last_error(void) { return last_error.c_str(); }

const char* ht_status_name(ht_status status) {
    switch (status) {
        case HT_OK:
            return "ok";
        case HT_ERR_INVALID_ARGUMENT:
            return "invalid argument";
        case HT_ERR_DOMAIN:
            return "domain error";
        case HT_ERR_PARSE:
            return "parse error";
        case HT_ERR_UNDEFINED_METRIC:
            return "undefined metric";
        case HT_ERR_IO:
            return "i/o error";
        case HT_ERR_CONFIG:
            return "config error";
        case HT_ERR_DATA:
            return "data error";
        case HT_ERR_NUMERIC:
            return "numeric error";
        case HT_ERR_INTERNAL:
            return "internal error";
    }
    return "unknown";
}

const char* ht_version(void) { return "0.1.0"; }

// ---------------------------------------------------------------- geohash

ht_status ht_geohash_encode(double lat, double lon, int level, char* out, size_t capacity) {
    if (out == nullptr) {
        return invalid("null output buffer");
    }
    return guarded([&] {
        const auto cell = geohash::encode(lat, lon, level);
        if (capacity < cell.code.size() + 1) {
            fail(ErrorKind::Domain, "output buffer too small");
        }
        std::memcpy(out, cell.code.c_str(), cell.code.size() + 1);
    });
}

ht_status ht_geohash_decode(const char* code, double bounds[4]) {
    if (code == nullptr || bounds == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        const auto b = geohash::decode(code).bounds;
        bounds[0] = b.lat_min;
        bounds[1] = b.lat_max;
        bounds[2] = b.lon_min;
        bounds[3] = b.lon_max;
    });
}

ht_status ht_geohash_cell_area_km2(const char* code, double* area) {
    if (code == nullptr || area == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] { *area = geohash::cell_area_km2(geohash::decode(code)); });
}

// ---------------------------------------------------------------- k-means

ht_status ht_kmeans_fit(const double* lat, const double* lon, size_t n, size_t k, uint64_t seed, int max_iter,
                        double tol, ht_kmeans** out) {
    if (lat == nullptr || lon == nullptr || out == nullptr) {
        return invalid("null argument");
    }
    *out = nullptr;
    return guarded([&] {
        kmeans::Options opt;
        opt.seed = seed;
        opt.max_iter = max_iter;
        opt.tol = tol;
        *out = new ht_kmeans{kmeans::fit(points_from(lat, lon, n), k, opt)};
    });
}

void ht_kmeans_free(ht_kmeans* model) { delete model; }

size_t ht_kmeans_k(const ht_kmeans* model) { return model ? model->model.k() : 0; }

ht_status ht_kmeans_centroid(const ht_kmeans* model, size_t i, double* lat, double* lon) {
    if (model == nullptr || lat == nullptr || lon == nullptr || i >= model->model.k()) {
        return invalid("bad k-means centroid query");
    }
    *lat = model->model.centroids[i].lat;
    *lon = model->model.centroids[i].lon;
    return HT_OK;
}

ht_status ht_kmeans_assignment(const ht_kmeans* model, size_t i, size_t* cluster) {
    if (model == nullptr || cluster == nullptr || i >= model->model.assignments.size()) {
        return invalid("bad k-means assignment query");
    }
    *cluster = model->model.assignments[i];
    return HT_OK;
}

ht_status ht_kmeans_density(const ht_kmeans* model, size_t i, size_t* count) {
    if (model == nullptr || count == nullptr || i >= model->model.k()) {
        return invalid("bad k-means density query");
    }
    *count = model->model.density[i];
    return HT_OK;
}

double ht_kmeans_objective(const ht_kmeans* model) { return model ? model->model.objective : 0.0; }

size_t ht_kmeans_iterations(const ht_kmeans* model) {
    return model ? static_cast<size_t>(model->model.iterations) : 0;
}

ht_status ht_kmeans_objective_trace(const ht_kmeans* model, double* out, size_t capacity, size_t* length) {
    if (model == nullptr || length == nullptr || (out == nullptr && capacity > 0)) {
        return invalid("bad k-means trace query");
    }
    const auto& trace = model->model.objective_trace;
    *length = trace.size();
    std::copy_n(trace.begin(), std::min(capacity, trace.size()), out);
    return HT_OK;
}

// ---------------------------------------------------------------- voronoi

ht_status ht_voronoi_build(const double* lat, const double* lon, size_t n, const double bounds[4],
                           ht_voronoi** out) {
    if (lat == nullptr || lon == nullptr || bounds == nullptr || out == nullptr) {
        return invalid("null argument");
    }
    *out = nullptr;
    return guarded([&] {
        const auto seeds = points_from(lat, lon, n);
        require(!seeds.empty(), ErrorKind::Domain, "no seeds");
        *out = new ht_voronoi{voronoi::Diagram(seeds, bounds_from(bounds), Projection::about_mean(seeds))};
    });
}

ht_status ht_voronoi_from_kmeans(const ht_kmeans* model, const double bounds[4], ht_voronoi** out) {
    if (model == nullptr || bounds == nullptr || out == nullptr) {
        return invalid("null argument");
    }
    *out = nullptr;
    return guarded([&] {
        *out = new ht_voronoi{
            voronoi::Diagram(model->model.centroids, bounds_from(bounds), model->model.projection)};
    });
}

void ht_voronoi_free(ht_voronoi* diagram) { delete diagram; }

size_t ht_voronoi_size(const ht_voronoi* diagram) { return diagram ? diagram->diagram.size() : 0; }

ht_status ht_voronoi_locate(const ht_voronoi* diagram, double lat, double lon, size_t* cell) {
    if (diagram == nullptr || cell == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] { *cell = diagram->diagram.locate({lat, lon}); });
}

ht_status ht_voronoi_cell_area_km2(const ht_voronoi* diagram, size_t i, double* area) {
    if (diagram == nullptr || area == nullptr || i >= diagram->diagram.size()) {
        return invalid("bad voronoi cell query");
    }
    *area = diagram->diagram.cell_area_km2(i);
    return HT_OK;
}

double ht_voronoi_bounds_area_km2(const ht_voronoi* diagram) {
    return diagram ? diagram->diagram.bounds_area_km2() : 0.0;
}

ht_status ht_voronoi_cell_vertices(const ht_voronoi* diagram, size_t i, double* x_km, double* y_km,
                                   size_t capacity, size_t* count) {
    if (diagram == nullptr || count == nullptr || i >= diagram->diagram.size() ||
        (capacity > 0 && (x_km == nullptr || y_km == nullptr))) {
        return invalid("bad voronoi vertex query");
    }
    const auto& poly = diagram->diagram.cell(i);
    *count = poly.size();
    for (std::size_t j = 0; j < std::min(capacity, poly.size()); ++j) {
        x_km[j] = poly[j].x;
        y_km[j] = poly[j].y;
    }
    return HT_OK;
}

ht_status ht_voronoi_write_csv(const ht_voronoi* diagram, const char* path) {
    if (diagram == nullptr || path == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        auto out = open_file(path);
        diagram->diagram.write_csv(out);
    });
}

// ---------------------------------------------------------------- metrics

ht_status ht_smape(const double* actual, const double* forecast, size_t n, double* out) {
    if (actual == nullptr || forecast == nullptr || out == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] { *out = metrics::smape({actual, n}, {forecast, n}); });
}

ht_status ht_mase(const double* actual, const double* forecast, size_t n, const double* training,
                  size_t n_training, size_t season, double* out) {
    if (actual == nullptr || forecast == nullptr || training == nullptr || out == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] { *out = metrics::mase({actual, n}, {forecast, n}, {training, n_training}, season); });
}

ht_status ht_ljung_box(const double* x, size_t n, size_t max_lag, double* q, double* p_value) {
    if (x == nullptr || q == nullptr || p_value == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        const auto r = metrics::ljung_box({x, n}, max_lag);
        *q = r.statistic;
        *p_value = r.p_value;
    });
}

ht_status ht_ks_two_sample(const double* a, size_t na, const double* b, size_t nb, double* d, double* p_value) {
    if ((a == nullptr && na > 0) || (b == nullptr && nb > 0) || d == nullptr || p_value == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        const auto r = metrics::ks_two_sample({a, na}, {b, nb});
        *d = r.statistic;
        *p_value = r.p_value;
    });
}

// ---------------------------------------------------------------- hedge

ht_status ht_hedge_create(size_t experts, double beta, double gamma, ht_hedge** out) {
    if (out == nullptr) {
        return invalid("null argument");
    }
    *out = nullptr;
    return guarded([&] { *out = new ht_hedge{hedge::Hedge(experts, beta, gamma), experts}; });
}

void ht_hedge_free(ht_hedge* h) { delete h; }

ht_status ht_hedge_step(ht_hedge* h, const double* errors, size_t* chosen) {
    if (h == nullptr || errors == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        const auto c = h->hedge.step({errors, h->experts});
        if (chosen != nullptr) {
            *chosen = c;
        }
    });
}

ht_status ht_hedge_weights(const ht_hedge* h, double* out, size_t capacity) {
    if (h == nullptr || out == nullptr || capacity < h->experts) {
        return invalid("bad hedge weight query");
    }
    const auto w = h->hedge.weights();
    std::copy(w.begin(), w.end(), out);
    return HT_OK;
}

ht_status ht_hedge_tune(const double* streams, size_t experts, size_t length, const double* beta_grid,
                        size_t n_beta, const double* gamma_grid, size_t n_gamma, double* beta, double* gamma,
                        double* mean_error) {
    if (streams == nullptr || beta_grid == nullptr || gamma_grid == nullptr || beta == nullptr ||
        gamma == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        std::vector<std::vector<double>> s(experts);
        for (std::size_t i = 0; i < experts; ++i) {
            s[i].assign(streams + i * length, streams + (i + 1) * length);
        }
        const auto r = hedge::tune(s, {beta_grid, beta_grid + n_beta}, {gamma_grid, gamma_grid + n_gamma});
        *beta = r.beta;
        *gamma = r.gamma;
        if (mean_error != nullptr) {
            *mean_error = r.mean_error;
        }
    });
}

// ---------------------------------------------------------------- experiment

ht_status ht_config_create(ht_config** out) {
    if (out == nullptr) {
        return invalid("null argument");
    }
    *out = nullptr;
    return guarded([&] { *out = new ht_config{}; });
}

void ht_config_free(ht_config* config) { delete config; }

ht_status ht_config_load_file(ht_config* config, const char* path) {
    if (config == nullptr || path == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] { config->config.load_file(path); });
}

ht_status ht_config_set(ht_config* config, const char* key, const char* value) {
    if (config == nullptr || key == nullptr || value == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] { config->config.set(key, value); });
}

ht_status ht_config_validate(const ht_config* config) {
    if (config == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] { config->config.validate(); });
}

ht_status ht_config_get(const ht_config* config, const char* key, char* out, size_t capacity) {
    if (config == nullptr || key == nullptr || out == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        const auto& c = config->config;
        const std::string k = key;
        std::string v;
        if (k == "out" || k == "out_dir") {
            v = c.out_dir;
        } else if (k == "input") {
            v = c.input;
        } else if (k == "seed") {
            v = std::to_string(c.seed);
        } else if (k == "k") {
            v = std::to_string(c.k);
        } else if (k == "geohash_level") {
            v = std::to_string(c.geohash_level);
        } else if (k == "metric") {
            v = experiment::metric_name(c.metric);
        } else if (k == "periods") {
            for (std::size_t i = 0; i < c.periods.size(); ++i) {
                v += (i ? "," : "") + std::to_string(c.periods[i]);
            }
        } else if (k == "beta_grid") {
            v = join(c.beta_grid);
        } else if (k == "gamma_grid") {
            v = join(c.gamma_grid);
        } else {
            fail(ErrorKind::Config, "unknown config key '" + k + "'");
        }
        require(capacity > v.size(), ErrorKind::Domain, "output buffer too small");
        std::memcpy(out, v.c_str(), v.size() + 1);
    });
}

ht_status ht_synth(const ht_config* config, const char* path, size_t* events) {
    if (config == nullptr || path == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        const auto& c = config->config;
        require(c.span_days >= 7, ErrorKind::Config, "synthetic span must be at least 7 days");
        const auto ev = synth::generate(experiment::synthetic_spec(c), c.span_days, c.seed);
        auto out = open_file(path);
        demand::write_events(out, ev);
        if (events != nullptr) {
            *events = ev.size();
        }
    });
}

ht_status ht_ingest(const ht_config* config, const char* path, size_t* kept, size_t* malformed,
                    size_t* out_of_bounds) {
    if (config == nullptr || path == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        experiment::IngestStats stats;
        const auto ev = experiment::load_events(config->config, &stats);
        auto out = open_file(path);
        demand::write_events(out, ev);
        if (kept != nullptr) {
            *kept = ev.size();
        }
        if (malformed != nullptr) {
            *malformed = stats.malformed;
        }
        if (out_of_bounds != nullptr) {
            *out_of_bounds = stats.out_of_bounds;
        }
    });
}

ht_status ht_tessellate(const ht_config* config, const char* dir) {
    if (config == nullptr || dir == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        const auto& c = config->config;
        c.validate();
        const auto root = ensure_dir(dir);
        const auto ev = experiment::load_events(c);
        const auto tess = experiment::tessellate(c, ev, experiment::grid_for(ev, c.periods.front()));
        auto centroids = open_file((root / "centroids.csv").string());
        experiment::write_centroids(centroids, tess, c.geohash_level);
        auto cells = open_file((root / "voronoi.csv").string());
        tess.diagram.write_csv(cells);
    });
}

ht_status ht_forecast(const ht_config* config, const char* dir) {
    if (config == nullptr || dir == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        const auto& c = config->config;
        c.validate();
        const auto root = ensure_dir(dir);
        const auto ev = experiment::load_events(c);
        const auto tess = experiment::tessellate(c, ev, experiment::grid_for(ev, c.periods.front()));
        experiment::ReportBundle bundle;
        bundle.metric = experiment::metric_name(c.metric);
        for (int p : c.periods) {
            bundle.periods.push_back(experiment::forecast_period(c, ev, tess, p));
        }
        auto errors = open_file((root / "expert_errors.csv").string());
        experiment::write_expert_errors(errors, bundle.periods);
        auto per_cell = open_file((root / "per_cell.csv").string());
        per_cell << "partition_id,strategy,model_kind,smape,mase,sampling_period_min,validation_smape,zero_demand\n";
        for (const auto& p : bundle.periods) {
            for (const auto& s : p.strategies) {
                for (const auto& cell : s.cells) {
                    per_cell << csv::escape(cell.partition_id) << ',' << cell.strategy << ','
                             << csv::escape(cell.model_kind) << ',' << (cell.smape ? csv::num(*cell.smape) : "")
                             << ',' << (cell.mase ? csv::num(*cell.mase) : "") << ',' << p.period_minutes << ','
                             << csv::num(cell.validation_smape) << ',' << (cell.zero_demand ? 1 : 0) << '\n';
                }
            }
        }
    });
}

ht_status ht_hedge_file(const ht_config* config, const char* errors_csv, const char* dir) {
    if (config == nullptr || errors_csv == nullptr || dir == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        std::ifstream in(errors_csv);
        require(in.good(), ErrorKind::Data, std::string("cannot open '") + errors_csv + "'");
        auto periods = experiment::read_expert_errors(in);
        const auto root = ensure_dir(dir);
        auto summary = open_file((root / "hedge.csv").string());
        summary << "sampling_period_min,beta,gamma,validation_mean_error,test_mean_error,switches\n";
        for (std::size_t i = 0; i < periods.size(); ++i) {
            auto& p = periods[i];
            experiment::hedge_period(config->config, p);
            summary << p.period_minutes << ',' << csv::num(p.tuned.beta) << ',' << csv::num(p.tuned.gamma) << ','
                    << csv::num(p.tuned.mean_error) << ',' << csv::num(p.hybrid.mean_hybrid_error()) << ','
                    << p.hybrid.switches << '\n';
            if (i == 0) {
                auto trace = open_file((root / "trace.csv").string());
                hedge::write_trace_csv(trace, p.hybrid.trace);
            }
            if (periods.size() > 1) {
                auto trace = open_file((root / ("trace_" + std::to_string(p.period_minutes) + "min.csv")).string());
                hedge::write_trace_csv(trace, p.hybrid.trace);
            }
        }
    });
}

ht_status ht_run(const ht_config* config, const char* dir, ht_report** out) {
    if (config == nullptr) {
        return invalid("null argument");
    }
    if (out != nullptr) {
        *out = nullptr;
    }
    return guarded([&] {
        auto bundle = dir != nullptr ? experiment::run_to_dir(config->config, dir) : experiment::run(config->config);
        if (out != nullptr) {
            *out = new ht_report{std::move(bundle)};
        }
    });
}

ht_status ht_report_load(const char* bundle_json, ht_report** out) {
    if (bundle_json == nullptr || out == nullptr) {
        return invalid("null argument");
    }
    *out = nullptr;
    return guarded([&] {
        std::ifstream in(bundle_json, std::ios::binary);
        require(in.good(), ErrorKind::Data, std::string("cannot open '") + bundle_json + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        *out = new ht_report{experiment::from_json(ss.str())};
    });
}

ht_status ht_report_write(const ht_report* report, const char* dir) {
    if (report == nullptr || dir == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] { experiment::write_report(report->bundle, dir); });
}

void ht_report_free(ht_report* report) { delete report; }

size_t ht_report_period_count(const ht_report* report) { return report ? report->bundle.periods.size() : 0; }

ht_status ht_report_period(const ht_report* report, size_t i, int* period_minutes) {
    if (report == nullptr || period_minutes == nullptr || i >= report->bundle.periods.size()) {
        return invalid("bad report period query");
    }
    *period_minutes = report->bundle.periods[i].period_minutes;
    return HT_OK;
}

ht_status ht_report_mean_error(const ht_report* report, size_t period, const char* strategy, double* mean_error) {
    if (report == nullptr || strategy == nullptr || mean_error == nullptr || period >= report->bundle.periods.size()) {
        return invalid("bad report query");
    }
    const auto& p = report->bundle.periods[period];
    if (std::strcmp(strategy, "hybrid") == 0) {
        *mean_error = p.hybrid.mean_hybrid_error();
        return HT_OK;
    }
    const auto* s = find_strategy(p, strategy);
    if (s == nullptr) {
        return invalid("unknown strategy");
    }
    *mean_error = s->mean_test_error();
    return HT_OK;
}

ht_status ht_report_hedge(const ht_report* report, size_t period, double* beta, double* gamma, size_t* switches,
                          double* switches_per_day) {
    if (report == nullptr || period >= report->bundle.periods.size()) {
        return invalid("bad report query");
    }
    const auto& p = report->bundle.periods[period];
    if (beta != nullptr) {
        *beta = p.tuned.beta;
    }
    if (gamma != nullptr) {
        *gamma = p.tuned.gamma;
    }
    if (switches != nullptr) {
        *switches = p.hybrid.switches;
    }
    if (switches_per_day != nullptr) {
        *switches_per_day = p.switches_per_day();
    }
    return HT_OK;
}

}  // extern "C"
