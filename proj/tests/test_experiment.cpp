// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "csv.hpp"
#include "error.hpp"
#include "experiment.hpp"

using namespace hybridtess;
namespace fs = std::filesystem;

namespace {

experiment::Config small_config() {
    experiment::Config c;
    std::istringstream in(
        "# small and quick\n"
        "span_days = 7\n"
        "hotspots = 8\n"
        "mean_rate = 0.3\n"
        "k = 10\n"
        "periods = 60\n"
        "candidates = snaive, hw\n"
        "seed = 3\n");
    c.load(in);
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        rows.push_back(csv::split(line));
    }
    return rows;
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("hybridtess_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_SUITE("experiment") {
    TEST_CASE("config parsing") {
        const auto c = small_config();
        CHECK(c.k == 10);
        CHECK(c.span_days == 7);
        CHECK(c.candidates.size() == 2);
        CHECK(c.candidates[1].name() == "hw");
        experiment::Config d;
        CHECK_THROWS_AS(d.set("no_such_key", "1"), Error);
        CHECK_THROWS_AS(d.set("k", "abc"), Error);
        CHECK_THROWS_AS(d.set("metric", "rmse"), Error);
        CHECK_THROWS_AS(d.set("candidates", "arima"), Error);
        std::istringstream bad("k 10\n");
        CHECK_THROWS_AS(d.load(bad), Error);
        d.set("periods", "15,7");
        CHECK_THROWS_AS(d.validate(), Error);
        d.set("periods", "15, 60");
        CHECK_NOTHROW(d.validate());
        d.set("boxcox", "none");
        CHECK(!d.boxcox);
        d.set("boxcox", "0.5");
        CHECK(d.boxcox_lambda == 0.5);
        d.set("bbox", "12.8,13.2,77.4,77.8");
        REQUIRE(d.bbox);
        CHECK(d.bbox->lon_max == 77.8);
        try {
            d.set("k", "-1");
            FAIL("accepted k = -1");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Config);
        }
    }

    TEST_CASE("report shape and internal consistency") {
        auto c = small_config();
        c.set("periods", "30,60");
        const auto dir = scratch("shape");
        const auto bundle = experiment::run_to_dir(c, dir.string());
        for (const char* f : {"summary.csv", "trace.csv", "per_cell.csv", "ecdf.csv", "cumulative.csv", "bundle.json",
                              "trace_30min.csv", "trace_60min.csv"}) {
            CHECK_MESSAGE(fs::exists(dir / f), f);
        }
        CHECK(!fs::exists(dir / "FAILED"));

        const auto summary = read_csv(dir / "summary.csv");
        CHECK(summary.size() == 1 + 3 * 2);
        CHECK(summary[0][0] == "sampling_period_min");

        const auto per_cell = read_csv(dir / "per_cell.csv");
        CHECK(per_cell[0][0] == "partition_id");
        CHECK(per_cell[0][4] == "mase");

        const auto ecdf = read_csv(dir / "ecdf.csv");
        int ks_rows = 0;
        for (const auto& r : ecdf) {
            if (r.size() > 1 && r[1] == "ks") {
                ++ks_rows;
                CHECK(!r[7].empty());
            }
        }
        CHECK(ks_rows == 2);  // one strategy pair per period

        const auto trace = read_csv(dir / "trace.csv");
        CHECK(trace[0] == std::vector<std::string>{"t", "chosen_expert", "e_0", "e_1", "l_0", "l_1", "w_0", "w_1"});
        CHECK(trace.size() == 1 + 48);  // first period is 30 min

        // The last cumulative row of each period equals the summary means.
        const auto cumulative = read_csv(dir / "cumulative.csv");
        for (const auto& p : bundle.periods) {
            const std::string period = std::to_string(p.period_minutes);
            std::vector<std::string> last;
            for (const auto& r : cumulative) {
                if (r[0] == period) {
                    last = r;
                }
            }
            REQUIRE(!last.empty());
            CHECK(csv::parse_double(last[2]) == doctest::Approx(p.strategies[0].mean_test_error()).epsilon(1e-9));
            CHECK(csv::parse_double(last[3]) == doctest::Approx(p.strategies[1].mean_test_error()).epsilon(1e-9));
            CHECK(csv::parse_double(last[4]) == doctest::Approx(p.hybrid.mean_hybrid_error()).epsilon(1e-9));
            const std::size_t bins = 1440 / static_cast<std::size_t>(p.period_minutes);
            CHECK(p.strategies[0].test_errors.size() == bins);
            CHECK(p.strategies[1].test_errors.size() == bins);
            CHECK(p.hybrid.hybrid_errors.size() == bins);
            CHECK(p.strategies[0].validation_errors.size() == bins);
        }

        // bundle.json reproduces every report file.
        const auto again = scratch("shape_again");
        experiment::write_report(experiment::from_json(slurp(dir / "bundle.json")), again.string());
        for (const char* f : {"summary.csv", "trace.csv", "per_cell.csv", "ecdf.csv", "cumulative.csv"}) {
            CHECK_MESSAGE(slurp(dir / f) == slurp(again / f), f);
        }
        fs::remove_all(dir);
        fs::remove_all(again);
    }

    TEST_CASE("same seed, same bytes") {
        const auto c = small_config();
        const auto a = scratch("det_a");
        const auto b = scratch("det_b");
        experiment::run_to_dir(c, a.string());
        experiment::run_to_dir(c, b.string());
        for (const char* f : {"summary.csv", "trace.csv", "per_cell.csv", "ecdf.csv", "cumulative.csv", "bundle.json"}) {
            CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
        }
        fs::remove_all(a);
        fs::remove_all(b);
    }

    TEST_CASE("mase plumbing") {
        auto c = small_config();
        c.set("metric", "mase");
        const auto bundle = experiment::run(c);
        CHECK(bundle.metric == "mase");
        const auto& p = bundle.periods.front();
        // Per-instant MASE contributions are scaled absolute errors; compare
        // against a SMAPE run to make sure they differ.
        auto s = small_config();
        const auto smape = experiment::run(s);
        CHECK(p.strategies[0].mean_test_error() != smape.periods.front().strategies[0].mean_test_error());
        CHECK(p.strategies[0].mean_test_error() < 10.0);
    }

    TEST_CASE("stage split via expert_errors.csv matches the full run") {
        const auto c = small_config();
        const auto full = experiment::run(c);
        std::stringstream ss;
        experiment::write_expert_errors(ss, full.periods);
        auto periods = experiment::read_expert_errors(ss);
        REQUIRE(periods.size() == 1);
        experiment::hedge_period(c, periods[0]);
        CHECK(periods[0].hybrid.hybrid_errors == full.periods[0].hybrid.hybrid_errors);
        CHECK(periods[0].tuned.beta == full.periods[0].tuned.beta);
        CHECK(periods[0].tuned.gamma == full.periods[0].tuned.gamma);
    }

    TEST_CASE("failures carry a stage label and leave a marker") {
        auto c = small_config();
        c.set("input", "/definitely/not/here.csv");
        const auto dir = scratch("failed");
        try {
            experiment::run_to_dir(c, dir.string());
            FAIL("run succeeded");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Data);
            CHECK(std::string(e.what()).rfind("ingest: ", 0) == 0);
        }
        const auto marker = slurp(dir / "FAILED");
        CHECK(marker.find("stage=ingest") != std::string::npos);
        CHECK(marker.find("error=data") != std::string::npos);
        fs::remove_all(dir);

        experiment::ReportBundle empty;
        const auto blocker = scratch("blocker");
        std::ofstream(blocker.string()) << "x";
        try {
            experiment::write_report(empty, (blocker / "sub").string());
            FAIL("wrote into a file path");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Io);
        }
        fs::remove(blocker);
    }

    TEST_CASE("csv input through schema A") {
        auto c = small_config();
        const auto events = experiment::load_events(c);
        const auto dir = scratch("input");
        fs::create_directories(dir);
        {
            std::ofstream out(dir / "events.csv");
            demand::write_events(out, events);
        }
        c.set("input", (dir / "events.csv").string());
        experiment::IngestStats stats;
        const auto loaded = experiment::load_events(c, &stats);
        CHECK(loaded.size() == events.size());
        CHECK(stats.malformed == 0);
        const auto bundle = experiment::run(c);
        CHECK(bundle.periods.size() == 1);
        fs::remove_all(dir);
    }
}
