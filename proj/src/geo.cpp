// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include "geo.hpp"

#include <algorithm>
#include <limits>

#include "error.hpp"

namespace hybridtess {

GeoBounds GeoBounds::around(std::span<const LatLon> points, double fraction) {
    require(!points.empty(), ErrorKind::Data, "bounds of an empty point set");
    GeoBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : points) {
        b.lat_min = std::min(b.lat_min, p.lat);
        b.lat_max = std::max(b.lat_max, p.lat);
        b.lon_min = std::min(b.lon_min, p.lon);
        b.lon_max = std::max(b.lon_max, p.lon);
    }
    // A single point (or a degenerate line) still needs a nonzero box.
    const double dlat = std::max(b.lat_max - b.lat_min, 1e-3);
    const double dlon = std::max(b.lon_max - b.lon_min, 1e-3);
    b.lat_min -= fraction * dlat;
    b.lat_max += fraction * dlat;
    b.lon_min -= fraction * dlon;
    b.lon_max += fraction * dlon;
    return b;
}

Projection Projection::about_mean(std::span<const LatLon> points) {
    require(!points.empty(), ErrorKind::Data, "projection about an empty point set");
    double lat = 0.0;
    double lon = 0.0;
    for (const auto& p : points) {
        lat += p.lat;
        lon += p.lon;
    }
    const auto n = static_cast<double>(points.size());
    return Projection({lat / n, lon / n});
}

}  // namespace hybridtess
