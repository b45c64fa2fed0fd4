// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end over the C API.

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hybridtess/hybridtess.h"

namespace {

// 0 success, 2 config, 3 data, 4 numeric.
int exit_code(ht_status s) {
    switch (s) {
        case HT_OK:
            return 0;
        case HT_ERR_CONFIG:
        case HT_ERR_INVALID_ARGUMENT:
            return 2;
        case HT_ERR_DATA:
        case HT_ERR_PARSE:
        case HT_ERR_IO:
            return 3;
        case HT_ERR_DOMAIN:
        case HT_ERR_UNDEFINED_METRIC:
        case HT_ERR_NUMERIC:
            return 4;
        case HT_ERR_INTERNAL:
            break;
    }
    return 1;
}

struct Failure {
    ht_status status;
};

void check(ht_status s) {
    if (s != HT_OK) {
        throw Failure{s};
    }
}

struct Options {
    std::string config;
    std::optional<std::string> input;
    std::optional<unsigned long long> seed;
    std::optional<int> period;
    std::optional<long long> k;
    std::optional<int> geohash_level;
    std::optional<std::string> metric;
    std::optional<std::string> out;
    std::optional<std::string> schema;
    std::string file;  // subcommand-specific input file
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "key=value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--input", o.input, "event CSV (synthetic city when absent)");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--period", o.period, "sampling period in minutes")->check(CLI::IsMember({5, 15, 30, 60}));
    cmd->add_option("--k", o.k, "number of clusters / Voronoi cells")->check(CLI::PositiveNumber);
    cmd->add_option("--geohash-level", o.geohash_level, "geohash precision")->check(CLI::Range(1, 12));
    cmd->add_option("--metric", o.metric, "error metric")->check(CLI::IsMember({"smape", "mase"}));
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--schema", o.schema, "input schema")->check(CLI::IsMember({"a", "b"}));
}

using ConfigPtr = std::unique_ptr<ht_config, decltype(&ht_config_free)>;

ConfigPtr make_config(const Options& o) {
    ht_config* raw = nullptr;
    check(ht_config_create(&raw));
    ConfigPtr c(raw, &ht_config_free);
    if (!o.config.empty()) {
        check(ht_config_load_file(c.get(), o.config.c_str()));
    }
    const auto set = [&](const char* key, const std::string& v) { check(ht_config_set(c.get(), key, v.c_str())); };
    if (o.input) {
        set("input", *o.input);
    }
    if (o.seed) {
        set("seed", std::to_string(*o.seed));
    }
    if (o.period) {
        set("periods", std::to_string(*o.period));
    }
    if (o.k) {
        set("k", std::to_string(*o.k));
    }
    if (o.geohash_level) {
        set("geohash_level", std::to_string(*o.geohash_level));
    }
    if (o.metric) {
        set("metric", *o.metric);
    }
    if (o.out) {
        set("out", *o.out);
    }
    if (o.schema) {
        set("schema", *o.schema);
    }
    return c;
}

std::string out_dir(const ht_config* c) {
    char buf[4096];
    check(ht_config_get(c, "out", buf, sizeof buf));
    std::filesystem::create_directories(buf);
    return buf;
}

std::string in_dir(const std::string& dir, const std::string& name) { return (std::filesystem::path(dir) / name).string(); }

void print_report(const ht_report* r) {
    std::printf("%-8s %-8s %12s %6s %6s %9s\n", "period", "strategy", "mean_error", "beta", "gamma", "sw/day");
    for (size_t i = 0; i < ht_report_period_count(r); ++i) {
        int period = 0;
        double beta = 0.0;
        double gamma = 0.0;
        double per_day = 0.0;
        check(ht_report_period(r, i, &period));
        check(ht_report_hedge(r, i, &beta, &gamma, nullptr, &per_day));
        for (const char* s : {"voronoi", "geohash", "hybrid"}) {
            double e = 0.0;
            check(ht_report_mean_error(r, i, s, &e));
            if (std::string(s) == "hybrid") {
                std::printf("%-8d %-8s %12.4f %6.2f %6.2f %9.2f\n", period, s, e, beta, gamma, per_day);
            } else {
                std::printf("%-8d %-8s %12.4f\n", period, s, e);
            }
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Demand forecasting over Voronoi and geohash tessellations with a discounted HEDGE combiner"};
    app.require_subcommand(1);
    Options o;

    auto* synth = app.add_subcommand("synth", "generate synthetic ride requests (events.csv)");
    auto* ingest = app.add_subcommand("ingest", "validate an event CSV and write the kept events (events.csv)");
    auto* tess = app.add_subcommand("tessellate", "K-Means hot spots and their Voronoi cells");
    auto* forecast = app.add_subcommand("forecast", "per-cell models and per-instant expert errors");
    auto* hedge = app.add_subcommand("hedge", "tune and run the combiner on expert_errors.csv");
    auto* run = app.add_subcommand("run", "full pipeline with all report files");
    auto* report = app.add_subcommand("report", "re-emit report files from bundle.json");
    for (auto* cmd : {synth, ingest, tess, forecast, hedge, run, report}) {
        add_common(cmd, o);
    }
    hedge->add_option("--errors", o.file, "expert error CSV (default <out>/expert_errors.csv)");
    report->add_option("--bundle", o.file, "bundle.json (default <out>/bundle.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        auto config = make_config(o);
        const std::string dir = out_dir(config.get());
        if (*synth) {
            size_t n = 0;
            const auto path = in_dir(dir, "events.csv");
            check(ht_synth(config.get(), path.c_str(), &n));
            std::printf("wrote %zu events to %s\n", n, path.c_str());
        } else if (*ingest) {
            size_t kept = 0;
            size_t malformed = 0;
            size_t oob = 0;
            const auto path = in_dir(dir, "events.csv");
            check(ht_ingest(config.get(), path.c_str(), &kept, &malformed, &oob));
            std::printf("kept %zu, malformed %zu, out of bounds %zu -> %s\n", kept, malformed, oob, path.c_str());
        } else if (*tess) {
            check(ht_tessellate(config.get(), dir.c_str()));
            std::printf("wrote centroids.csv and voronoi.csv to %s\n", dir.c_str());
        } else if (*forecast) {
            check(ht_forecast(config.get(), dir.c_str()));
            std::printf("wrote per_cell.csv and expert_errors.csv to %s\n", dir.c_str());
        } else if (*hedge) {
            const auto errors = o.file.empty() ? in_dir(dir, "expert_errors.csv") : o.file;
            check(ht_hedge_file(config.get(), errors.c_str(), dir.c_str()));
            std::printf("wrote hedge.csv and trace.csv to %s\n", dir.c_str());
        } else if (*run) {
            ht_report* raw = nullptr;
            check(ht_run(config.get(), dir.c_str(), &raw));
            std::unique_ptr<ht_report, decltype(&ht_report_free)> r(raw, &ht_report_free);
            print_report(r.get());
        } else if (*report) {
            const auto bundle = o.file.empty() ? in_dir(dir, "bundle.json") : o.file;
            ht_report* raw = nullptr;
            check(ht_report_load(bundle.c_str(), &raw));
            std::unique_ptr<ht_report, decltype(&ht_report_free)> r(raw, &ht_report_free);
            check(ht_report_write(r.get(), dir.c_str()));
            print_report(r.get());
        }
    } catch (const Failure& f) {
        std::fprintf(stderr, "hybridtess: %s: %s\n", ht_status_name(f.status), ht_last_error());
        return exit_code(f.status);
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "hybridtess: %s\n", e.what());
        return 3;
    }
    return 0;
}
