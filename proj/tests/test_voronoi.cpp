// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "error.hpp"
#include "kmeans.hpp"
#include "voronoi.hpp"

using namespace hybridtess;

namespace {

const Projection kOrigin({0.0, 0.0});

GeoBounds km_box(double half_w, double half_h) {
    const auto lo = kOrigin.inverse({-half_w, -half_h});
    const auto hi = kOrigin.inverse({half_w, half_h});
    return {lo.lat, hi.lat, lo.lon, hi.lon};
}

// Inside-or-on test for a counter-clockwise convex polygon.
bool inside_convex(const voronoi::Polygon& poly, PointKm p) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < -1e-9) {
            return false;
        }
    }
    return true;
}

std::size_t brute_nearest(const std::vector<PointKm>& seeds, PointKm p) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < seeds.size(); ++j) {
        if (squared_distance(p, seeds[j]) < squared_distance(p, seeds[best])) {
            best = j;
        }
    }
    return best;
}

}  // namespace

TEST_SUITE("voronoi") {
    TEST_CASE("two symmetric seeds split a 3 x 2 km rectangle") {
        const std::vector<LatLon> seeds{kOrigin.inverse({-0.25, 0.0}), kOrigin.inverse({0.25, 0.0})};
        const voronoi::Diagram d(seeds, km_box(1.5, 1.0), kOrigin);
        CHECK(d.cell_area_km2(0) == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(d.cell_area_km2(1) == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(d.bounds_area_km2() == doctest::Approx(6.0).epsilon(1e-9));
        CHECK(d.locate(kOrigin.inverse({-1.0, 0.3})) == 0);
        CHECK(d.locate(kOrigin.inverse({1.0, -0.3})) == 1);
        CHECK(d.locate(kOrigin.inverse({0.0, 0.5})) == 0);  // on the bisector
    }

    TEST_CASE("single seed owns the rectangle") {
        const std::vector<LatLon> seeds{kOrigin.inverse({0.3, 0.2})};
        const voronoi::Diagram d(seeds, km_box(2.0, 1.0), kOrigin);
        CHECK(d.size() == 1);
        CHECK(d.cell_area_km2(0) == doctest::Approx(8.0).epsilon(1e-9));
    }

    TEST_CASE("random diagrams partition the rectangle and agree with nearest-seed sampling") {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> ux(-4.9, 4.9);
        std::uniform_real_distribution<double> uy(-2.9, 2.9);
        std::vector<LatLon> seeds;
        for (int i = 0; i < 25; ++i) {
            seeds.push_back(kOrigin.inverse({ux(rng), uy(rng)}));
        }
        const voronoi::Diagram d(seeds, km_box(5.0, 3.0), kOrigin);
        double total = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            total += d.cell_area_km2(i);
            CHECK(inside_convex(d.cell(i), d.seeds_km()[i]));
            CHECK(voronoi::polygon_area(d.cell(i)) > 0.0);
        }
        CHECK(std::abs(total - d.bounds_area_km2()) / d.bounds_area_km2() < 1e-6);

        std::uniform_real_distribution<double> px(-5.0, 5.0);
        std::uniform_real_distribution<double> py(-3.0, 3.0);
        int agree = 0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            const PointKm p{px(rng), py(rng)};
            const auto nearest = brute_nearest(d.seeds_km(), p);
            if (inside_convex(d.cell(nearest), p)) {
                ++agree;
            }
            REQUIRE(d.locate(kOrigin.inverse(p)) == nearest);
        }
        CHECK(agree >= n * 999 / 1000);
    }

    TEST_CASE("locate at a seed returns that seed") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        std::vector<LatLon> seeds;
        for (int i = 0; i < 10; ++i) {
            seeds.push_back(kOrigin.inverse({u(rng), u(rng)}));
        }
        const voronoi::Diagram d(seeds, km_box(2.5, 2.5), kOrigin);
        CHECK(d.locate(seeds[7]) == 7);
    }

    TEST_CASE("bisector tie goes to the lower index") {
        const std::vector<LatLon> seeds{kOrigin.inverse({-1.0, 1.0}), kOrigin.inverse({1.0, -1.0}),
                                        kOrigin.inverse({-1.0, -1.0})};
        const voronoi::Diagram d(seeds, km_box(2.0, 2.0), kOrigin);
        // (1, 1) is equidistant from seeds 0 and 1.
        CHECK(d.locate(kOrigin.inverse({1.0, 1.0})) == 0);
    }

    TEST_CASE("errors") {
        const auto box = km_box(1.0, 1.0);
        const std::vector<LatLon> same{kOrigin.inverse({0.1, 0.1}), kOrigin.inverse({0.1, 0.1})};
        CHECK_THROWS_AS(voronoi::Diagram(same, box, kOrigin), Error);
        const std::vector<LatLon> outside{kOrigin.inverse({3.0, 0.0})};
        CHECK_THROWS_AS(voronoi::Diagram(outside, box, kOrigin), Error);
        const std::vector<LatLon> ok{kOrigin.inverse({0.0, 0.0})};
        const voronoi::Diagram d(ok, box, kOrigin);
        CHECK_THROWS_AS(d.locate(kOrigin.inverse({5.0, 0.0})), Error);
        CHECK_THROWS_AS(d.cell_area_km2(1), Error);
    }

    TEST_CASE("converged k-means seeds sit near their cell centroids") {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        std::vector<LatLon> pts;
        for (int i = 0; i < 20000; ++i) {
            pts.push_back(kOrigin.inverse({u(rng), u(rng)}));
        }
        kmeans::Options opt;
        opt.seed = 5;
        opt.tol = 0.0;
        const auto m = kmeans::fit(pts, 9, kOrigin, opt);
        const voronoi::Diagram d(m.centroids, km_box(3.0, 3.0), kOrigin);
        for (std::size_t i = 0; i < d.size(); ++i) {
            const auto c = voronoi::polygon_centroid(d.cell(i));
            CHECK(std::sqrt(squared_distance(c, d.seeds_km()[i])) <= 0.2);
            // Duality with the clustering metric.
            CHECK(d.locate(m.centroids[i]) == kmeans::nearest_centroid(m, m.centroids[i]));
        }
        for (int i = 0; i < 5000; ++i) {
            REQUIRE(d.locate(pts[i]) == kmeans::nearest_centroid(m, pts[i]));
        }
    }

    TEST_CASE("polygon CSV export") {
        const std::vector<LatLon> seeds{kOrigin.inverse({-0.25, 0.0}), kOrigin.inverse({0.25, 0.0})};
        const voronoi::Diagram d(seeds, km_box(1.5, 1.0), kOrigin);
        std::ostringstream os;
        d.write_csv(os);
        std::istringstream is(os.str());
        std::string line;
        std::getline(is, line);
        CHECK(line == "seed_id,vertex_index,x_km,y_km,area_km2");
        int rows = 0;
        while (std::getline(is, line)) {
            ++rows;
        }
        CHECK(rows == static_cast<int>(d.cell(0).size() + d.cell(1).size()));
    }
}
