// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numbers>
#include <span>

namespace hybridtess {

/// Mean earth radius (IUGG), km.
inline constexpr double kEarthRadiusKm = 6371.0088;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const LatLon&, const LatLon&) = default;
};

/// Axis-aligned rectangle in degrees.
struct GeoBounds {
    double lat_min = 0.0;
    double lat_max = 0.0;
    double lon_min = 0.0;
    double lon_max = 0.0;

    bool contains(LatLon p) const {
        return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
    }
    bool strictly_contains(LatLon p) const {
        return p.lat > lat_min && p.lat < lat_max && p.lon > lon_min && p.lon < lon_max;
    }
    LatLon center() const { return {(lat_min + lat_max) / 2.0, (lon_min + lon_max) / 2.0}; }

    /// Bounding box of `points`, each side pushed out by `fraction` of its extent.
    static GeoBounds around(std::span<const LatLon> points, double fraction);
};

/// Planar point in km.
struct PointKm {
    double x = 0.0;
    double y = 0.0;
};

inline double squared_distance(PointKm a, PointKm b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// Equirectangular projection about a reference point. City-scale only.
class Projection {
public:
    Projection() = default;
    explicit Projection(LatLon origin)
        : origin_(origin), kx_(kEarthRadiusKm * deg_to_rad(1.0) * std::cos(deg_to_rad(origin.lat))),
          ky_(kEarthRadiusKm * deg_to_rad(1.0)) {}

    /// Projection about the mean latitude/longitude of `points`.
    static Projection about_mean(std::span<const LatLon> points);

    PointKm forward(LatLon p) const { return {(p.lon - origin_.lon) * kx_, (p.lat - origin_.lat) * ky_}; }
    LatLon inverse(PointKm q) const { return {origin_.lat + q.y / ky_, origin_.lon + q.x / kx_}; }
    LatLon origin() const { return origin_; }

private:
    LatLon origin_{};
    double kx_ = kEarthRadiusKm * deg_to_rad(1.0);
    double ky_ = kEarthRadiusKm * deg_to_rad(1.0);
};

}  // namespace hybridtess
