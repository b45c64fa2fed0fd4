// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks A1-A11. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails. A11 needs a taxi trip CSV passed as the first
// argument or in HYBRIDTESS_NYC_CSV; without one it is reported as skipped.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "experiment.hpp"
#include "geohash.hpp"
#include "hedge.hpp"
#include "kmeans.hpp"
#include "metrics.hpp"
#include "stl.hpp"
#include "synth.hpp"
#include "voronoi.hpp"

namespace ht = hybridtess;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// A1 -------------------------------------------------------------------------

double smape_oracle(const std::vector<double>& a, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        s += 100.0 * std::fabs(f[t] - a[t]) / (std::fabs(a[t]) + std::fabs(f[t]));
    }
    return s / static_cast<double>(a.size());
}

double mase_oracle(const std::vector<double>& a, const std::vector<double>& f, const std::vector<double>& y,
                   std::size_t m) {
    double num = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        num += std::fabs(a[t] - f[t]);
    }
    num /= static_cast<double>(a.size());
    double den = 0.0;
    for (std::size_t t = m; t < y.size(); ++t) {
        den += std::fabs(y[t] - y[t - m]);
    }
    den /= static_cast<double>(y.size() - m);
    return num / den;
}

Outcome a1() {
    const auto start = Clock::now();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.1, 50.0);
    std::uniform_int_distribution<std::size_t> len(2, 200);
    std::uniform_int_distribution<std::size_t> season(1, 24);
    double worst = 0.0;
    for (int r = 0; r < 1000; ++r) {
        const std::size_t h = len(rng);
        const std::size_t m = season(rng);
        std::vector<double> a(h), f(h), y(m + len(rng));
        for (auto* v : {&a, &f, &y}) {
            for (double& x : *v) {
                x = u(rng);
            }
        }
        const double s = ht::metrics::smape(a, f);
        const double q = ht::metrics::mase(a, f, y, m);
        worst = std::max(worst, std::fabs(s - smape_oracle(a, f)) / std::max(1.0, smape_oracle(a, f)));
        worst = std::max(worst, std::fabs(q - mase_oracle(a, f, y, m)) / std::max(1.0, mase_oracle(a, f, y, m)));
    }
    const double secs = seconds_since(start);
    return {worst <= 1e-9 && secs < 5.0, fmt("max deviation %.3g over 1000 series, %.2f s", worst, secs)};
}

// A2 -------------------------------------------------------------------------

Outcome a2() {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t experts = 3;
    const double beta = 0.35;
    ht::hedge::Hedge h(experts, beta, 1.0);
    std::vector<double> w(experts, 1.0 / experts);
    double worst = 0.0;
    std::size_t mismatched = 0;
    std::vector<double> e(experts);
    for (int t = 0; t < 10000; ++t) {
        for (double& x : e) {
            x = u(rng);
        }
        const std::size_t expected = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
        const double total = std::accumulate(e.begin(), e.end(), 0.0);
        double norm = 0.0;
        for (std::size_t i = 0; i < experts; ++i) {
            w[i] *= std::pow(beta, e[i] / total);
            norm += w[i];
        }
        for (double& x : w) {
            x /= norm;
        }
        if (h.step(e) != expected) {
            ++mismatched;
        }
        const auto got = h.weights();
        for (std::size_t i = 0; i < experts; ++i) {
            worst = std::max(worst, std::fabs(got[i] - w[i]));
        }
    }
    return {worst <= 1e-12 && mismatched == 0,
            fmt("max weight deviation %.3g, %zu differing decisions over 1e4 steps", worst, mismatched)};
}

// A3 -------------------------------------------------------------------------

std::vector<std::vector<double>> regime_streams(std::mt19937_64& rng) {
    const std::size_t n = 96;
    std::uniform_int_distribution<std::size_t> at(16, 80);
    const std::size_t s = at(rng);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<std::vector<double>> out(2, std::vector<double>(n));
    for (std::size_t t = 0; t < n; ++t) {
        const double m0 = t < s ? 10.0 : 20.0;
        const double m1 = t < s ? 20.0 : 10.0;
        out[0][t] = std::max(0.0, m0 * (1.0 + 0.1 * noise(rng)));
        out[1][t] = std::max(0.0, m1 * (1.0 + 0.1 * noise(rng)));
    }
    return out;
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

Outcome a3() {
    const auto start = Clock::now();
    int ok = 0;
    for (int r = 0; r < 100; ++r) {
        std::mt19937_64 rng(3000 + r);
        const auto validation = regime_streams(rng);
        const auto test = regime_streams(rng);
        const auto tuned = ht::hedge::tune(validation, ht::hedge::default_grid(), ht::hedge::default_grid());
        const double hybrid = ht::hedge::run(test, tuned.beta, tuned.gamma).mean_hybrid_error();
        if (hybrid <= 1.05 * std::min(mean(test[0]), mean(test[1]))) {
            ++ok;
        }
    }
    const double secs = seconds_since(start);
    return {ok >= 95 && secs < 30.0, fmt("%d/100 runs within 5%% of the best expert, %.2f s", ok, secs)};
}

// A4 / A5 / A6 ---------------------------------------------------------------

double mean_error(const ht::experiment::PeriodRun& p, const std::string& name) {
    if (name == "hybrid") {
        return p.hybrid.mean_hybrid_error();
    }
    for (const auto& s : p.strategies) {
        if (s.name == name) {
            return s.mean_test_error();
        }
    }
    throw std::runtime_error("no strategy " + name);
}

Outcome a4() {
    ht::experiment::Config c;
    c.periods = {60, 15};
    const auto bundle = ht::experiment::run(c);
    const double d60 = bundle.periods[0].switches_per_day();
    const double d15 = bundle.periods[1].switches_per_day();
    return {d60 <= 3.0 && d15 <= 10.0, fmt("switches/day %.2f at 60 min, %.2f at 15 min", d60, d15)};
}

Outcome a5() {
    const auto start = Clock::now();
    int ok = 0;
    double worst = 0.0;
    for (int seed = 1; seed <= 100; ++seed) {
        ht::experiment::Config c;
        c.seed = static_cast<std::uint64_t>(seed);
        c.regime_day = 13.5;
        const auto bundle = ht::experiment::run(c);
        const auto& p = bundle.periods.front();
        const double best = std::min(mean_error(p, "voronoi"), mean_error(p, "geohash"));
        const double ratio = mean_error(p, "hybrid") / best;
        worst = std::max(worst, ratio);
        if (ratio <= 1.05) {
            ++ok;
        }
    }
    const double secs = seconds_since(start);
    return {ok >= 95 && secs < 300.0,
            fmt("%d/100 seeds with hybrid <= 1.05 x best, worst ratio %.3f, %.1f s", ok, worst, secs)};
}

// Seasonal signal-to-noise of one hotspot's hourly counts: standard deviation
// of the expected count over a week divided by the Poisson noise sd.
double hourly_snr(const ht::synth::CitySpec& spec, const ht::synth::Hotspot& h) {
    std::vector<double> counts;
    for (int hour = 0; hour < 7 * 24; ++hour) {
        double c = 0.0;
        for (int minute = 0; minute < 60; ++minute) {
            c += ht::synth::intensity(spec, h, (hour * 60.0 + minute + 0.5) * 60.0);
        }
        counts.push_back(c);
    }
    const double mu = mean(counts);
    double var = 0.0;
    for (double c : counts) {
        var += (c - mu) * (c - mu);
    }
    var /= static_cast<double>(counts.size());
    return std::sqrt(var) / std::sqrt(mu);
}

Outcome a6() {
    ht::experiment::Config c;
    c.set("mean_rate", "2");
    c.set("daily_amplitude", "0.8");
    c.set("scatter_km", "0.3");
    const auto spec = ht::experiment::synthetic_spec(c);
    const auto hotspots = ht::synth::layout(spec, c.seed);
    double snr = std::numeric_limits<double>::infinity();
    for (const auto& h : hotspots) {
        snr = std::min(snr, hourly_snr(spec, h));
    }
    const auto bundle = ht::experiment::run(c);
    const auto& p = bundle.periods.front();
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& cell : p.strategies.front().cells) {
        if (cell.smape) {
            sum += *cell.smape;
            ++n;
        }
    }
    const double smape = n ? sum / static_cast<double>(n) : 100.0;
    return {snr >= 4.0 && smape <= 20.0,
            fmt("min hotspot SNR %.2f, mean per-partition SMAPE %.2f over %zu Voronoi cells", snr, smape, n)};
}

// A7 -------------------------------------------------------------------------

Outcome a7() {
    const ht::GeoBounds b{12.8, 13.1, 77.4, 77.8};
    std::size_t wrong = 0;
    double worst = 0.0;
    for (int r = 0; r < 20; ++r) {
        std::mt19937_64 rng(7000 + r);
        std::uniform_real_distribution<double> lat(b.lat_min + 1e-4, b.lat_max - 1e-4);
        std::uniform_real_distribution<double> lon(b.lon_min + 1e-4, b.lon_max - 1e-4);
        std::vector<ht::LatLon> seeds(5 + 5 * static_cast<std::size_t>(r));
        for (auto& s : seeds) {
            s = {lat(rng), lon(rng)};
        }
        const auto proj = ht::Projection::about_mean(seeds);
        const ht::voronoi::Diagram d(seeds, b, proj);
        const auto& a = d.areas();
        const double total = std::accumulate(a.begin(), a.end(), 0.0);
        worst = std::max(worst, std::fabs(total - d.bounds_area_km2()) / d.bounds_area_km2());
        std::vector<ht::PointKm> km;
        for (const auto& s : seeds) {
            km.push_back(proj.forward(s));
        }
        for (int i = 0; i < 100000; ++i) {
            const ht::LatLon p{lat(rng), lon(rng)};
            const ht::PointKm q = proj.forward(p);
            std::size_t best = 0;
            for (std::size_t j = 1; j < km.size(); ++j) {
                if (ht::squared_distance(q, km[j]) < ht::squared_distance(q, km[best])) {
                    best = j;
                }
            }
            if (d.locate(p) != best) {
                ++wrong;
            }
        }
    }
    return {worst < 1e-6 && wrong == 0, fmt("max area error %.3g, %zu misplaced of 2e6 points", worst, wrong)};
}

// A8 -------------------------------------------------------------------------

Outcome a8() {
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> lat(-90.0, 90.0);
    std::uniform_real_distribution<double> lon(-180.0, 180.0);
    std::size_t failures = 0;
    for (int i = 0; i < 1000000; ++i) {
        const int level = 1 + i % 12;
        const auto cell = ht::geohash::encode(lat(rng), lon(rng), level);
        const auto back = ht::geohash::decode(cell.code);
        const auto again = ht::geohash::encode(back.center().lat, back.center().lon, level);
        if (again.code != cell.code || back.bounds.lat_min != cell.bounds.lat_min ||
            back.bounds.lon_max != cell.bounds.lon_max) {
            ++failures;
        }
    }
    const std::string vec = ht::geohash::encode(57.64911, 10.40744, 6).code;
    const double area = ht::geohash::cell_area_km2(ht::geohash::encode(13.0, 77.6, 6));
    const bool ok = failures == 0 && vec == "u4pruy" && std::fabs(area - 0.72) <= 0.05 * 0.72;
    return {ok, fmt("%zu round-trip failures in 1e6, vector %s, level-6 area %.3f km^2", failures, vec.c_str(), area)};
}

// A9 -------------------------------------------------------------------------

Outcome a9() {
    std::size_t increases = 0;
    for (int r = 0; r < 100; ++r) {
        std::mt19937_64 rng(9000 + r);
        std::normal_distribution<double> g(0.0, 0.02);
        std::vector<ht::LatLon> pts(300);
        for (auto& p : pts) {
            p = {13.0 + g(rng), 77.6 + g(rng)};
        }
        const auto m = ht::kmeans::fit(pts, 3 + r % 10, {.seed = static_cast<std::uint64_t>(r)});
        for (std::size_t i = 1; i < m.objective_trace.size(); ++i) {
            if (m.objective_trace[i] > m.objective_trace[i - 1] * (1.0 + 1e-12)) {
                ++increases;
            }
        }
    }
    std::vector<ht::LatLon> distinct{{13.0, 77.6}, {13.01, 77.6}, {13.0, 77.62}, {13.03, 77.61}, {12.99, 77.58}};
    const double j_n = ht::kmeans::fit(distinct, distinct.size()).objective;

    // Two tight pairs far apart; the brute-force optimum over all 2-partitions.
    const std::vector<ht::LatLon> four{{13.0, 77.6}, {13.0, 77.61}, {13.1, 77.6}, {13.1, 77.61}};
    const auto proj = ht::Projection::about_mean(four);
    double brute = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < 15; ++mask) {
        double cost = 0.0;
        for (unsigned side = 0; side < 2; ++side) {
            ht::PointKm c{};
            int n = 0;
            for (unsigned i = 0; i < 4; ++i) {
                if (((mask >> i) & 1U) == side) {
                    const auto q = proj.forward(four[i]);
                    c.x += q.x;
                    c.y += q.y;
                    ++n;
                }
            }
            c.x /= n;
            c.y /= n;
            for (unsigned i = 0; i < 4; ++i) {
                if (((mask >> i) & 1U) == side) {
                    cost += ht::squared_distance(proj.forward(four[i]), c);
                }
            }
        }
        brute = std::min(brute, cost);
    }
    const double j4 = ht::kmeans::fit(four, 2, proj, {}).objective;
    const bool ok = increases == 0 && j_n == 0.0 && std::fabs(j4 - brute) <= 1e-9 * brute;
    return {ok, fmt("%zu objective increases in 100 runs, J(K=n)=%.3g, 4-point J=%.6f vs optimum %.6f", increases,
                    j_n, j4, brute)};
}

// A10 ------------------------------------------------------------------------

Outcome a10() {
    std::mt19937_64 rng(1010);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> y(24 * 14);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = 20.0 + 0.01 * t + 5.0 * std::sin(2.0 * M_PI * t / 24.0) + g(rng);
    }
    const auto d = ht::stl::decompose(y, 24);
    double recompose = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        recompose = std::max(recompose, std::fabs(d.seasonal[t] + d.trend[t] + d.remainder[t] - y[t]));
    }
    int white = 0;
    for (int r = 0; r < 100; ++r) {
        std::vector<double> x(500);
        for (double& v : x) {
            v = g(rng);
        }
        if (ht::metrics::ljung_box(x, 10).p_value > 0.05) {
            ++white;
        }
    }
    // Containment is judged over the pooled lags of all 100 sets.
    std::size_t inside = 0;
    std::size_t lags = 0;
    std::mt19937_64 rng2(1011);
    for (int r = 0; r < 100; ++r) {
        std::vector<double> x(500);
        for (double& v : x) {
            v = g(rng2);
        }
        const auto a = ht::metrics::acf(x, 40);
        inside += static_cast<std::size_t>(std::lround(a.fraction_inside_band() * 40.0));
        lags += 40;
    }
    const double band = static_cast<double>(inside) / static_cast<double>(lags);
    return {recompose <= 1e-9 && white >= 90 && band >= 0.93,
            fmt("recomposition error %.3g, Ljung-Box white %d/100, ACF containment %.3f", recompose, white, band)};
}

// A11 ------------------------------------------------------------------------

Outcome a11(const std::string& path) {
    if (path.empty()) {
        return {true, "skipped: no taxi CSV given (argument or HYBRIDTESS_NYC_CSV)"};
    }
    ht::experiment::Config c;
    c.input = path;
    c.schema = ht::demand::Schema::B;
    c.k = 100;
    c.periods = {60};
    const fs::path dir = fs::temp_directory_path() / "hybridtess_a11";
    fs::remove_all(dir);
    const auto bundle = ht::experiment::run_to_dir(c, dir.string());
    bool ok = true;
    for (const char* f : {"summary.csv", "trace.csv", "per_cell.csv", "ecdf.csv", "cumulative.csv"}) {
        ok = ok && fs::exists(dir / f);
    }
    const auto& p = bundle.periods.front();
    ok = ok && p.hybrid.hybrid_errors.size() == p.strategies.front().test_errors.size();
    return {ok, fmt("%zu events, %zu Voronoi cells, report in %s", bundle.ingest.events,
                    p.strategies.front().cells.size(), dir.string().c_str())};
}

}  // namespace

int main(int argc, char** argv) {
    std::string nyc;
    if (argc > 1) {
        nyc = argv[1];
    } else if (const char* env = std::getenv("HYBRIDTESS_NYC_CSV")) {
        nyc = env;
    }
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4},  {"A5", a5},
        {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10},
        {"A11", [&] { return a11(nyc); }},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        std::printf("%-4s %s  %s\n", name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
