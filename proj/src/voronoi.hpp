// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "geo.hpp"

namespace hybridtess::voronoi {

using Polygon = std::vector<PointKm>;

/// Shoelace area of a simple polygon (absolute value).
double polygon_area(const Polygon& poly);

/// Area centroid of a convex polygon with nonzero area.
PointKm polygon_centroid(const Polygon& poly);

/// Keep the part of a convex polygon where a.x*x + a.y*y <= c.
Polygon clip_half_plane(const Polygon& poly, PointKm a, double c);

/// Voronoi partition of a city rectangle, computed in the planar km frame of
/// `projection`. Immutable once built.
class Diagram {
public:
    Diagram(std::span<const LatLon> seeds, const GeoBounds& bounds, const Projection& projection);

    std::size_t size() const { return seeds_.size(); }
    const std::vector<LatLon>& seeds() const { return seeds_; }
    const std::vector<PointKm>& seeds_km() const { return seeds_km_; }
    const GeoBounds& bounds() const { return bounds_; }
    const Projection& projection() const { return projection_; }
    const Polygon& cell(std::size_t i) const;
    const std::vector<double>& areas() const { return areas_; }

    double cell_area_km2(std::size_t i) const;
    /// Area of the clipping rectangle in the planar frame.
    double bounds_area_km2() const;

    /// Nearest seed, lowest index on ties. Throws for points outside bounds.
    std::size_t locate(LatLon p) const;

    /// `seed_id,vertex_index,x_km,y_km,area_km2` rows with a header.
    void write_csv(std::ostream& os) const;

private:
    std::vector<LatLon> seeds_;
    std::vector<PointKm> seeds_km_;
    GeoBounds bounds_;
    Projection projection_;
    std::vector<Polygon> cells_;
    std::vector<double> areas_;
};

}  // namespace hybridtess::voronoi
