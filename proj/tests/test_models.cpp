// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "error.hpp"
#include "metrics.hpp"
#include "models.hpp"
#include "optimize.hpp"
#include "stl.hpp"

using namespace hybridtess;
using models::Kind;

namespace {

std::vector<double> periodic(std::size_t n, std::size_t m, double level = 20.0, double amp = 5.0) {
    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t) {
        y[t] = level + amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(m)) +
               0.5 * amp * std::cos(4.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(m));
    }
    return y;
}

double holdout_smape(const models::Model& model, const std::vector<double>& full, std::size_t n_train) {
    const auto fc = model->one_step(full, n_train);
    return metrics::smape(std::span<const double>(full).subspan(n_train), fc);
}

void check_params_in_unit_box(const models::Model& m) {
    for (const auto& [name, value] : m->params()) {
        if (name == "alpha" || name == "beta" || name.rfind("gamma", 0) == 0) {
            CHECK(value >= 0.0);
            CHECK(value <= 1.0);
        }
    }
}

}  // namespace

TEST_SUITE("models") {
    TEST_CASE("baseline") {
        std::vector<double> y(3 * 168 + 1, 0.0);
        y[0] = 10.0;
        y[168] = 12.0;
        y[336] = 14.0;
        const auto m = models::fit_baseline(std::span<const double>(y).first(3 * 168), 168, 7);
        CHECK(m->forecast(1)[0] == doctest::Approx(12.0));
        const std::vector<double> c(50, 4.2);
        CHECK(models::fit_baseline(c, 7, 7)->forecast(10)[9] == doctest::Approx(4.2));
        const auto x = periodic(100, 10);
        const auto one = models::fit_baseline(x, 10, 1);
        const auto sn = models::fit_simple(x, Kind::SeasonalNaive, 10);
        CHECK(one->forecast(15) == sn->forecast(15));
        CHECK_THROWS_AS(models::fit_baseline(std::vector<double>{1, 2}, 3, 7), Error);
    }

    TEST_CASE("simple benchmarks") {
        CHECK(models::fit_simple(std::vector<double>{1, 2, 3}, Kind::Drift)->forecast(2)[1] == doctest::Approx(5.0));
        CHECK(models::fit_simple(std::vector<double>{1, 2, 3, 4}, Kind::SeasonalNaive, 2)->forecast(1)[0] == 3.0);
        CHECK(models::fit_simple(std::vector<double>{3, 9, 7}, Kind::Naive)->forecast(5)[4] == 7.0);
        const auto sn = models::fit_simple(std::vector<double>{1, 2, 3, 4, 5, 6}, Kind::SeasonalNaive, 3);
        CHECK(sn->forecast(7) == std::vector<double>{4, 5, 6, 4, 5, 6, 4});
        CHECK_THROWS_AS(models::fit_simple(std::vector<double>{1}, Kind::Naive), Error);
        CHECK_THROWS_AS(models::fit_simple(std::vector<double>{1, 2}, Kind::SeasonalNaive, 3), Error);
    }

    TEST_CASE("one-step forecasts follow the forecast rule") {
        const std::vector<double> y{1, 2, 3, 4, 5, 6, 7, 8};
        const auto m = models::fit_simple(std::span<const double>(y).first(5), Kind::Naive);
        CHECK(m->one_step(y, 5) == std::vector<double>{5, 6, 7});
    }

    TEST_CASE("holt-winters") {
        const std::size_t m = 12;
        const auto y = periodic(10 * m, m);
        const auto hw = models::fit_holt_winters(std::span<const double>(y).first(8 * m), m);
        CHECK(holdout_smape(hw, y, 8 * m) < 1.0);
        check_params_in_unit_box(hw);

        const std::vector<double> c(60, 7.5);
        const auto hc = models::fit_holt_winters(c, 12);
        for (double f : hc->forecast(24)) {
            CHECK(f == doctest::Approx(7.5).epsilon(1e-6));
        }
        double mean = 0.0;
        for (double r : hc->residuals()) {
            mean += r;
        }
        CHECK(std::abs(mean / static_cast<double>(hc->residuals().size())) < 1e-8);
        CHECK_THROWS_AS(models::fit_holt_winters(std::vector<double>(10, 1.0), 12), Error);
        std::vector<double> bad(40, 1.0);
        bad[3] = NAN;
        CHECK_THROWS_AS(models::fit_holt_winters(bad, 12), Error);
    }

    TEST_CASE("stl decomposition") {
        std::mt19937_64 rng(2);
        std::normal_distribution<double> z(0.0, 1.0);
        auto y = periodic(24 * 10, 24);
        for (std::size_t t = 0; t < y.size(); ++t) {
            y[t] += 0.05 * static_cast<double>(t) + z(rng);
        }
        y[100] += 30.0;  // an outlier for the robustness pass
        const auto d = stl::decompose(y, 24);
        for (std::size_t t = 0; t < y.size(); ++t) {
            REQUIRE(std::abs(d.seasonal[t] + d.trend[t] + d.remainder[t] - y[t]) <= 1e-9);
        }
        CHECK(d.weights[100] < 0.5);
        CHECK(stl::next_odd(1.5 * 24) == 37);
        CHECK(stl::next_odd(24) == 25);
        CHECK(stl::next_odd(7) == 7);
        CHECK_THROWS_AS(stl::decompose(std::vector<double>(48, 1.0), 24), Error);
    }

    TEST_CASE("stl forecasts") {
        const std::size_t m = 24;
        std::vector<double> y(12 * m);
        for (std::size_t t = 0; t < y.size(); ++t) {
            y[t] = 50.0 + 0.1 * static_cast<double>(t) +
                   8.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(m));
        }
        const auto drift = models::fit_stl(std::span<const double>(y).first(11 * m), m, models::StlInner::Drift);
        CHECK(holdout_smape(drift, y, 11 * m) < 2.0);
        for (auto inner : {models::StlInner::Naive, models::StlInner::Ses, models::StlInner::Ar}) {
            const auto model = models::fit_stl(std::span<const double>(y).first(11 * m), m, inner);
            CHECK(std::isfinite(model->forecast(3 * m).back()));
            check_params_in_unit_box(model);
        }
        // The seasonal part continues with period m.
        const std::vector<double> flat_trend = periodic(8 * m, m);
        const auto sn = models::fit_stl(flat_trend, m, models::StlInner::Naive);
        const auto f = sn->forecast(3 * m);
        for (std::size_t h = m; h < 3 * m; ++h) {
            CHECK(f[h] == doctest::Approx(f[h - m]).epsilon(1e-9));
        }
    }

    TEST_CASE("tbats-lite: recursion reduces to Holt when seasonality is frozen") {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> z(0.0, 1.0);
        std::vector<double> y(200);
        for (std::size_t t = 0; t < y.size(); ++t) {
            y[t] = 30.0 + 0.2 * static_cast<double>(t) + z(rng);
        }
        const std::vector<std::size_t> periods{24};
        models::TbatsParams p;
        p.alpha = 0.3;
        p.beta = 0.05;
        p.gamma = {0.0};
        models::TbatsState st;
        st.level = 30.0;
        st.trend = 0.1;
        st.s = {{0.0, 0.0}};
        st.s_star = {{0.0, 0.0}};
        const auto fc = models::tbats_filter(y, periods, p, st);
        double l = 30.0;
        double b = 0.1;
        for (std::size_t t = 0; t < y.size(); ++t) {
            REQUIRE(fc[t] == doctest::Approx(l + b).epsilon(1e-12));
            const double prev = l;
            l = p.alpha * y[t] + (1.0 - p.alpha) * (l + b);
            b = p.beta * (l - prev) + (1.0 - p.beta) * b;
        }
    }

    TEST_CASE("tbats-lite refits data generated by its own recursion") {
        const std::size_t m = 24;
        std::mt19937_64 rng(9);
        std::normal_distribution<double> z(0.0, 0.01);
        double level = 50.0;
        const double trend = 0.02;
        std::vector<double> y(22 * m);
        for (std::size_t t = 0; t < y.size(); ++t) {
            const double w = 2.0 * std::numbers::pi * static_cast<double>(t + 1) / static_cast<double>(m);
            const double factor = 1.0 + 0.3 * std::cos(w) + 0.1 * std::sin(2.0 * w);
            y[t] = (level + trend) * factor * (1.0 + z(rng));
            level += trend;
        }
        const auto model = models::fit_tbats_lite(std::span<const double>(y).first(20 * m), {m}, {2});
        CHECK(holdout_smape(model, y, 20 * m) < 3.0);
        check_params_in_unit_box(model);
        std::vector<double> with_zero(y.begin(), y.begin() + 4 * m);
        with_zero[5] = 0.0;
        CHECK_THROWS_AS(models::fit_tbats_lite(with_zero, {m}, {2}), Error);
    }

    TEST_CASE("model selection") {
        const std::size_t m = 24;
        models::FitConfig fc;
        fc.season = m;
        fc.baseline_season = m;
        const auto y = periodic(10 * m, m);
        const std::span<const double> ys(y);
        const auto only = models::select_model(ys.first(9 * m), ys.subspan(9 * m), {}, fc);
        CHECK(only.model->kind() == Kind::Baseline);

        std::mt19937_64 rng(1);
        std::normal_distribution<double> z(10.0, 1.0);
        std::vector<double> noise(10 * m);
        for (auto& v : noise) {
            v = z(rng);
        }
        const std::vector<models::Spec> cands{models::Spec::parse("naive"), models::Spec::parse("snaive"),
                                              models::Spec::parse("hw"), models::Spec::parse("stl-ses")};
        const std::span<const double> ns(noise);
        const auto sel = models::select_model(ns.first(9 * m), ns.subspan(9 * m), cands, fc);
        for (const auto& s : sel.scores) {
            if (s.smape) {
                CHECK(sel.validation_smape <= *s.smape);
            }
        }
        CHECK(models::Spec::parse("stl-ar").name() == "stl-ar");
        CHECK_THROWS_AS(models::Spec::parse("arima"), Error);
    }

    TEST_CASE("strongly weekly series select a seasonal model") {
        const std::size_t m = 7;
        models::FitConfig fc;
        fc.season = m;
        fc.baseline_season = m;
        const std::vector<models::Spec> cands{models::Spec::parse("naive"), models::Spec::parse("drift"),
                                              models::Spec::parse("snaive"), models::Spec::parse("hw")};
        int seasonal = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> z(0.0, 1.0);
            auto y = periodic(16 * m, m, 40.0, 12.0);
            for (auto& v : y) {
                v += z(rng);
            }
            const std::span<const double> ys(y);
            const auto sel = models::select_model(ys.first(14 * m), ys.subspan(14 * m, m), cands, fc);
            const auto k = sel.model->kind();
            seasonal += (k != Kind::Naive && k != Kind::Drift) ? 1 : 0;
        }
        CHECK(seasonal >= 95);
    }

    TEST_CASE("box-cox aware selection stays on the demand scale") {
        const std::size_t m = 24;
        models::FitConfig fc;
        fc.season = m;
        fc.baseline_season = m;
        const demand::BoxCox t{0.0};
        auto y = periodic(9 * m, m, 20.0, 5.0);
        for (auto& v : y) {
            v = t.forward(v);
        }
        const std::span<const double> ys(y);
        const auto sel =
            models::select_model(ys.first(8 * m), ys.subspan(8 * m), {models::Spec::parse("snaive")}, fc, t);
        CHECK(sel.validation_smape < 1e-9);
        const auto back = models::to_demand_scale(std::vector<double>{-5.0, t.forward(3.0)}, t);
        CHECK(back[0] == 0.0);
        CHECK(back[1] == doctest::Approx(3.0));
    }

    TEST_CASE("nelder-mead") {
        const auto f = [](std::span<const double> x) {
            return (x[0] - 0.3) * (x[0] - 0.3) + 10.0 * (x[1] - 0.7) * (x[1] - 0.7);
        };
        const optimize::Box box{{0.0, 0.0}, {1.0, 1.0}};
        const auto r = optimize::nelder_mead(f, {0.1, 0.1}, box, 500);
        CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-4));
        CHECK(r.x[1] == doctest::Approx(0.7).epsilon(1e-4));
        CHECK(r.evaluations <= 500);
        const auto edge = optimize::nelder_mead([](std::span<const double> x) { return -x[0]; }, {0.5}, {{0.0}, {1.0}},
                                                200);
        CHECK(edge.x[0] <= 1.0);
        CHECK(edge.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    }
}
