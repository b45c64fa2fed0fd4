// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include "kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "error.hpp"

namespace hybridtess::kmeans {

std::size_t nearest_index(std::span<const PointKm> centres, PointKm p) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centres.size(); ++j) {
        const double d = squared_distance(p, centres[j]);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

namespace {

std::vector<PointKm> plus_plus_init(std::span<const PointKm> pts, std::size_t k, std::mt19937_64& rng) {
    std::vector<PointKm> centres;
    centres.reserve(k);
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    centres.push_back(pts[pick(rng)]);

    std::vector<double> d2(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        d2[i] = squared_distance(pts[i], centres[0]);
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (centres.size() < k) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t chosen = 0;
        if (total > 0.0) {
            const double target = unit(rng) * total;
            double acc = 0.0;
            chosen = pts.size() - 1;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                acc += d2[i];
                if (acc > target && d2[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
            // Never pick a point that already coincides with a centre.
            while (d2[chosen] == 0.0 && chosen > 0) {
                --chosen;
            }
        } else {
            // Every point sits on an existing centre; duplicates are unavoidable.
            chosen = pick(rng);
        }
        centres.push_back(pts[chosen]);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            d2[i] = std::min(d2[i], squared_distance(pts[i], centres.back()));
        }
    }
    return centres;
}

}  // namespace

ClusterModel fit(std::span<const LatLon> points, std::size_t k, const Options& options) {
    require(!points.empty(), ErrorKind::Domain, "k-means needs at least one point");
    return fit(points, k, Projection::about_mean(points), options);
}

ClusterModel fit(std::span<const LatLon> points, std::size_t k, const Projection& projection,
                 const Options& options) {
    const std::size_t n = points.size();
    require(n >= 1, ErrorKind::Domain, "k-means needs at least one point");
    require(k >= 1, ErrorKind::Domain, "k must be positive");
    require(k <= n, ErrorKind::Domain,
            "k (" + std::to_string(k) + ") exceeds number of points (" + std::to_string(n) + ")");
    require(options.max_iter >= 1, ErrorKind::Domain, "max_iter must be positive");
    require(options.tol >= 0.0, ErrorKind::Domain, "tol must be nonnegative");

    std::vector<PointKm> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = projection.forward(points[i]);
    }

    std::mt19937_64 rng(options.seed);
    std::vector<PointKm> centres = plus_plus_init(pts, k, rng);

    constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> assign(n, kUnassigned);
    std::vector<double> dist(n, 0.0);
    std::vector<double> trace;
    double prev_objective = std::numeric_limits<double>::infinity();
    int iter = 0;

    while (true) {
        ++iter;
        std::size_t moved = 0;
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = nearest_index(centres, pts[i]);
            if (j != assign[i]) {
                ++moved;
                assign[i] = j;
            }
            dist[i] = squared_distance(pts[i], centres[j]);
            objective += dist[i];
        }
        trace.push_back(objective);

        const bool converged = moved == 0 ||
                               (std::isfinite(prev_objective) &&
                                prev_objective - objective <= options.tol * prev_objective);
        if (converged || iter >= options.max_iter) {
            break;
        }
        prev_objective = objective;

        // Update step; sums accumulate in point order so the result is reproducible.
        std::vector<PointKm> sums(k);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[assign[i]].x += pts[i].x;
            sums[assign[i]].y += pts[i].y;
            ++counts[assign[i]];
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] > 0) {
                centres[j] = {sums[j].x / static_cast<double>(counts[j]),
                              sums[j].y / static_cast<double>(counts[j])};
            }
        }
        // Empty clusters are re-seeded at the point farthest from its centre.
        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] != 0) {
                continue;
            }
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = squared_distance(pts[i], centres[assign[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far_d <= 0.0) {
                continue;
            }
            centres[j] = pts[far];
            --counts[assign[far]];
            assign[far] = j;
            counts[j] = 1;
        }
    }

    ClusterModel model;
    model.projection = projection;
    model.centroids_km = centres;
    model.centroids.reserve(k);
    for (const auto& c : centres) {
        model.centroids.push_back(projection.inverse(c));
    }
    model.assignments = std::move(assign);
    model.density.assign(k, 0);
    for (auto j : model.assignments) {
        ++model.density[j];
    }
    model.objective = trace.back();
    model.objective_trace = std::move(trace);
    model.iterations = iter;
    return model;
}

std::vector<std::size_t> sort_by_density(const ClusterModel& model) {
    std::vector<std::size_t> order(model.k());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return model.density[a] > model.density[b]; });
    return order;
}

std::size_t nearest_centroid(const ClusterModel& model, LatLon p) {
    return nearest_index(model.centroids_km, model.projection.forward(p));
}

}  // namespace hybridtess::kmeans
