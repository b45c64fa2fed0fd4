// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include "voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "error.hpp"
#include "kmeans.hpp"

namespace hybridtess::voronoi {

double polygon_area(const Polygon& poly) {
    double twice = 0.0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    return std::abs(twice) / 2.0;
}

PointKm polygon_centroid(const Polygon& poly) {
    double twice = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % n];
        const double cross = p.x * q.y - q.x * p.y;
        twice += cross;
        cx += (p.x + q.x) * cross;
        cy += (p.y + q.y) * cross;
    }
    return {cx / (3.0 * twice), cy / (3.0 * twice)};
}

Polygon clip_half_plane(const Polygon& poly, PointKm a, double c) {
    Polygon out;
    out.reserve(poly.size() + 1);
    const auto side = [&](PointKm p) { return a.x * p.x + a.y * p.y - c; };
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        const PointKm p = poly[i];
        const PointKm q = poly[(i + 1) % n];
        const double sp = side(p);
        const double sq = side(q);
        if (sp <= 0.0) {
            out.push_back(p);
        }
        if ((sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0)) {
            const double t = sp / (sp - sq);
            out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
        }
    }
    return out;
}

Diagram::Diagram(std::span<const LatLon> seeds, const GeoBounds& bounds, const Projection& projection)
    : seeds_(seeds.begin(), seeds.end()), bounds_(bounds), projection_(projection) {
    require(!seeds_.empty(), ErrorKind::Domain, "voronoi needs at least one seed");
    require(bounds.lat_max > bounds.lat_min && bounds.lon_max > bounds.lon_min, ErrorKind::Domain,
            "voronoi bounds are empty");
    seeds_km_.reserve(seeds_.size());
    for (std::size_t i = 0; i < seeds_.size(); ++i) {
        require(bounds.strictly_contains(seeds_[i]), ErrorKind::Domain,
                "seed " + std::to_string(i) + " outside bounds");
        seeds_km_.push_back(projection.forward(seeds_[i]));
    }

    const PointKm lo = projection.forward({bounds.lat_min, bounds.lon_min});
    const PointKm hi = projection.forward({bounds.lat_max, bounds.lon_max});
    const Polygon rect{{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}};

    const std::size_t k = seeds_km_.size();
    cells_.resize(k);
    areas_.resize(k);
    std::vector<std::size_t> order(k);
    std::vector<double> d2(k);
    for (std::size_t i = 0; i < k; ++i) {
        const PointKm s = seeds_km_[i];
        for (std::size_t j = 0; j < k; ++j) {
            d2[j] = squared_distance(s, seeds_km_[j]);
        }
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return d2[a] < d2[b] || (d2[a] == d2[b] && a < b);
        });

        Polygon cell = rect;
        for (std::size_t j : order) {
            if (j == i) {
                continue;
            }
            require(d2[j] > 1e-18, ErrorKind::Domain,
                    "seeds " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
            // Once the bisector lies beyond the farthest vertex, no later seed can clip.
            double reach = 0.0;
            for (const auto& v : cell) {
                reach = std::max(reach, squared_distance(s, v));
            }
            if (d2[j] > 4.0 * reach) {
                break;
            }
            const PointKm t = seeds_km_[j];
            const PointKm normal{t.x - s.x, t.y - s.y};
            const double c = ((t.x * t.x + t.y * t.y) - (s.x * s.x + s.y * s.y)) / 2.0;
            cell = clip_half_plane(cell, normal, c);
        }
        areas_[i] = polygon_area(cell);
        cells_[i] = std::move(cell);
    }
}

const Polygon& Diagram::cell(std::size_t i) const {
    require(i < cells_.size(), ErrorKind::Domain, "voronoi cell index out of range");
    return cells_[i];
}

double Diagram::cell_area_km2(std::size_t i) const {
    require(i < areas_.size(), ErrorKind::Domain, "voronoi cell index out of range");
    return areas_[i];
}

double Diagram::bounds_area_km2() const {
    const PointKm lo = projection_.forward({bounds_.lat_min, bounds_.lon_min});
    const PointKm hi = projection_.forward({bounds_.lat_max, bounds_.lon_max});
    return (hi.x - lo.x) * (hi.y - lo.y);
}

std::size_t Diagram::locate(LatLon p) const {
    require(bounds_.contains(p), ErrorKind::Domain, "point outside voronoi bounds");
    return kmeans::nearest_index(seeds_km_, projection_.forward(p));
}

void Diagram::write_csv(std::ostream& os) const {
    os << "seed_id,vertex_index,x_km,y_km,area_km2\n";
    char buf[160];
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        for (std::size_t v = 0; v < cells_[i].size(); ++v) {
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.9g,%.9g,%.9g\n", i, v, cells_[i][v].x, cells_[i][v].y,
                          areas_[i]);
            os << buf;
        }
    }
}

}  // namespace hybridtess::voronoi
