// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include "geohash.hpp"

#include <array>
#include <cmath>

#include "error.hpp"

namespace hybridtess::geohash {

namespace {

constexpr std::string_view kAlphabet = "0123456789bcdefghjkmnpqrstuvwxyz";

constexpr std::array<int, 128> make_decode_table() {
    std::array<int, 128> table{};
    for (auto& v : table) {
        v = -1;
    }
    for (int i = 0; i < 32; ++i) {
        table[static_cast<unsigned char>(kAlphabet[static_cast<std::size_t>(i)])] = i;
    }
    return table;
}

constexpr auto kDecode = make_decode_table();

}  // namespace

Cell encode(double lat, double lon, int level) {
    require(level >= 1 && level <= kMaxLevel, ErrorKind::Domain,
            "geohash level must be in [1, 12], got " + std::to_string(level));
    require(lat >= -90.0 && lat <= 90.0, ErrorKind::Domain, "latitude out of range");
    require(lon >= -180.0 && lon <= 180.0, ErrorKind::Domain, "longitude out of range");

    GeoBounds b{-90.0, 90.0, -180.0, 180.0};
    std::string code;
    code.reserve(static_cast<std::size_t>(level));
    bool lon_bit = true;
    for (int c = 0; c < level; ++c) {
        int symbol = 0;
        for (int bit = 0; bit < 5; ++bit) {
            symbol <<= 1;
            if (lon_bit) {
                const double mid = (b.lon_min + b.lon_max) / 2.0;
                if (lon >= mid) {
                    symbol |= 1;
                    b.lon_min = mid;
                } else {
                    b.lon_max = mid;
                }
            } else {
                const double mid = (b.lat_min + b.lat_max) / 2.0;
                if (lat >= mid) {
                    symbol |= 1;
                    b.lat_min = mid;
                } else {
                    b.lat_max = mid;
                }
            }
            lon_bit = !lon_bit;
        }
        code.push_back(kAlphabet[static_cast<std::size_t>(symbol)]);
    }
    return {std::move(code), b};
}

Cell decode(std::string_view code) {
    require(!code.empty(), ErrorKind::Parse, "empty geohash");
    require(code.size() <= static_cast<std::size_t>(kMaxLevel), ErrorKind::Parse, "geohash longer than 12");
    GeoBounds b{-90.0, 90.0, -180.0, 180.0};
    bool lon_bit = true;
    for (char ch : code) {
        const auto u = static_cast<unsigned char>(ch);
        const int symbol = u < 128 ? kDecode[u] : -1;
        require(symbol >= 0, ErrorKind::Parse, std::string("invalid geohash character '") + ch + "'");
        for (int bit = 4; bit >= 0; --bit) {
            const bool upper = ((symbol >> bit) & 1) != 0;
            if (lon_bit) {
                const double mid = (b.lon_min + b.lon_max) / 2.0;
                (upper ? b.lon_min : b.lon_max) = mid;
            } else {
                const double mid = (b.lat_min + b.lat_max) / 2.0;
                (upper ? b.lat_min : b.lat_max) = mid;
            }
            lon_bit = !lon_bit;
        }
    }
    return {std::string(code), b};
}

double rectangle_area_km2(const GeoBounds& b) {
    const double dlon = deg_to_rad(b.lon_max - b.lon_min);
    return kEarthRadiusKm * kEarthRadiusKm * dlon *
           (std::sin(deg_to_rad(b.lat_max)) - std::sin(deg_to_rad(b.lat_min)));
}

double cell_area_km2(const Cell& cell) { return rectangle_area_km2(cell.bounds); }

}  // namespace hybridtess::geohash
