// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "demand.hpp"
#include "geo.hpp"

namespace hybridtess::synth {

enum class Geometry { Radial, Linear };

struct Hotspot {
    LatLon centre;
    double scatter_km = 0.5;
    double base_rate = 1.0;    ///< events per minute at zero seasonal modulation
    double daily_phase = 0.0;  ///< radians
};

/// From `start_offset_s` (seconds after the span start) every hotspot's
/// scatter is multiplied by `scatter_factor`.
struct RegimeSwitch {
    std::int64_t start_offset_s = 0;
    double scatter_factor = 1.0;
};

struct CitySpec {
    Geometry geometry = Geometry::Radial;
    LatLon centre{12.9716, 77.5946};
    std::size_t num_hotspots = 30;
    double radius_km = 8.0;       ///< radial: hotspot ring extent; linear: half length of the corridor
    double scatter_km = 0.4;
    double mean_rate = 0.5;       ///< mean base rate per hotspot, events per minute
    double daily_amplitude = 0.5;
    double weekly_amplitude = 0.1;
    std::optional<RegimeSwitch> regime;
    std::size_t users = 50000;
    double repeat_probability = 0.02;  ///< chance an event is re-booked by the same user minutes later
    std::int64_t start = 1767571200;   ///< 2026-01-05T00:00:00Z, a Monday
    /// Explicit hotspots; generated from the fields above when empty.
    std::vector<Hotspot> hotspots;
};

/// Hotspot layout for `spec` (the explicit list if given).
std::vector<Hotspot> layout(const CitySpec& spec, std::uint64_t seed);

/// Poisson intensity (events per minute) of `h` at `t` seconds after the start.
double intensity(const CitySpec& spec, const Hotspot& h, double t_seconds);

/// Expected number of events over the span (sum of per-minute intensities).
double expected_events(const CitySpec& spec, const std::vector<Hotspot>& hotspots, int span_days);

/// Inhomogeneous Poisson draws per hotspot per minute, time-ordered. Deterministic per seed.
std::vector<demand::Event> generate(const CitySpec& spec, int span_days, std::uint64_t seed);

}  // namespace hybridtess::synth
