// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "geo.hpp"

namespace hybridtess::geohash {

inline constexpr int kMaxLevel = 12;

/// A fixed-precision geohash cell. `bounds` is half-open on the upper edges
/// except where the edge is the pole or the antimeridian.
struct Cell {
    std::string code;
    GeoBounds bounds;

    int level() const { return static_cast<int>(code.size()); }
    LatLon center() const { return bounds.center(); }
};

/// Interleaved lon/lat bisection; ties at a midpoint go to the upper half.
Cell encode(double lat, double lon, int level);

Cell decode(std::string_view code);

/// Spherical-earth area of the cell's lat/lon rectangle.
double cell_area_km2(const Cell& cell);

/// Area of a lat/lon rectangle on the sphere.
double rectangle_area_km2(const GeoBounds& b);

}  // namespace hybridtess::geohash
