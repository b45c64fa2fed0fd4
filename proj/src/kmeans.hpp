// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "geo.hpp"

namespace hybridtess::kmeans {

struct Options {
    std::uint64_t seed = 1;
    int max_iter = 300;
    double tol = 1e-6;  ///< relative objective improvement below which Lloyd stops
};

/// Immutable result of a K-Means fit. Distances are Euclidean in the
/// equirectangular km plane given by `projection`.
struct ClusterModel {
    Projection projection;
    std::vector<LatLon> centroids;
    std::vector<PointKm> centroids_km;
    std::vector<std::size_t> assignments;
    std::vector<std::size_t> density;
    double objective = 0.0;                ///< sum of squared km distances to assigned centroid
    std::vector<double> objective_trace;   ///< objective after each assignment step
    int iterations = 0;

    std::size_t k() const { return centroids.size(); }
};

ClusterModel fit(std::span<const LatLon> points, std::size_t k, const Options& options = {});

/// Same as `fit`, but in an explicitly supplied projection.
ClusterModel fit(std::span<const LatLon> points, std::size_t k, const Projection& projection,
                 const Options& options);

/// Centroid indices by descending density, ascending index on ties.
std::vector<std::size_t> sort_by_density(const ClusterModel& model);

/// Index of the nearest centroid; lowest index on exact ties.
std::size_t nearest_centroid(const ClusterModel& model, LatLon p);

std::size_t nearest_index(std::span<const PointKm> centres, PointKm p);

}  // namespace hybridtess::kmeans
