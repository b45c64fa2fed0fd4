// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "error.hpp"

namespace hybridtess::synth {

namespace {

constexpr double kDay = 86400.0;
constexpr double kWeek = 7.0 * kDay;

}  // namespace

std::vector<Hotspot> layout(const CitySpec& spec, std::uint64_t seed) {
    if (!spec.hotspots.empty()) {
        return spec.hotspots;
    }
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Projection proj(spec.centre);
    std::vector<Hotspot> out;
    for (std::size_t i = 0; i < spec.num_hotspots; ++i) {
        PointKm p;
        if (spec.geometry == Geometry::Radial) {
            // Denser toward the centre: radius ~ R * u.
            const double r = spec.radius_km * unit(rng);
            const double a = 2.0 * std::numbers::pi * unit(rng);
            p = {r * std::cos(a), r * std::sin(a)};
        } else {
            p = {(unit(rng) - 0.5) * 0.3 * spec.radius_km, (unit(rng) - 0.5) * 2.0 * spec.radius_km};
        }
        Hotspot h;
        h.centre = proj.inverse(p);
        h.scatter_km = spec.scatter_km;
        h.base_rate = spec.mean_rate * (0.5 + unit(rng));
        h.daily_phase = (unit(rng) - 0.5) * std::numbers::pi / 2.0;
        out.push_back(h);
    }
    return out;
}

double intensity(const CitySpec& spec, const Hotspot& h, double t_seconds) {
    const double daily = 1.0 + spec.daily_amplitude * std::sin(2.0 * std::numbers::pi * t_seconds / kDay + h.daily_phase);
    const double weekly = 1.0 + spec.weekly_amplitude * std::sin(2.0 * std::numbers::pi * t_seconds / kWeek);
    return std::max(0.0, h.base_rate * daily * weekly);
}

double expected_events(const CitySpec& spec, const std::vector<Hotspot>& hotspots, int span_days) {
    double total = 0.0;
    const int minutes = span_days * 1440;
    for (const auto& h : hotspots) {
        for (int m = 0; m < minutes; ++m) {
            total += intensity(spec, h, 60.0 * m);
        }
    }
    return total;
}

std::vector<demand::Event> generate(const CitySpec& spec, int span_days, std::uint64_t seed) {
    require(span_days >= 7, ErrorKind::Domain, "synthetic span must cover at least one week");
    require(spec.scatter_km > 0.0, ErrorKind::Domain, "scatter must be positive");
    require(spec.mean_rate >= 0.0, ErrorKind::Domain, "rates must be nonnegative");
    const auto hotspots = layout(spec, seed);
    for (const auto& h : hotspots) {
        require(h.base_rate >= 0.0 && h.scatter_km > 0.0, ErrorKind::Domain, "invalid hotspot");
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> second(0, 59);
    std::uniform_int_distribution<std::size_t> user(0, std::max<std::size_t>(spec.users, 1) - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> rebook_delay(60, 20 * 60);
    const Projection proj(spec.centre);

    std::vector<demand::Event> events;
    const int minutes = span_days * 1440;
    for (int m = 0; m < minutes; ++m) {
        const double t = 60.0 * m;
        double scatter_factor = 1.0;
        if (spec.regime && static_cast<std::int64_t>(t) >= spec.regime->start_offset_s) {
            scatter_factor = spec.regime->scatter_factor;
        }
        for (const auto& h : hotspots) {
            const double rate = intensity(spec, h, t);
            if (rate <= 0.0) {
                continue;
            }
            std::poisson_distribution<int> draws(rate);
            const int count = draws(rng);
            const PointKm c = proj.forward(h.centre);
            for (int e = 0; e < count; ++e) {
                const double sd = h.scatter_km * scatter_factor;
                const PointKm p{c.x + sd * gauss(rng), c.y + sd * gauss(rng)};
                demand::Event ev;
                ev.timestamp = spec.start + static_cast<std::int64_t>(t) + second(rng);
                ev.where = proj.inverse(p);
                ev.user_id = "u" + std::to_string(user(rng));
                if (unit(rng) < spec.repeat_probability) {
                    demand::Event again = ev;
                    again.timestamp += rebook_delay(rng);
                    events.push_back(std::move(again));
                }
                events.push_back(std::move(ev));
            }
        }
    }
    const std::int64_t end = spec.start + static_cast<std::int64_t>(span_days) * 86400;
    std::erase_if(events, [&](const demand::Event& e) { return e.timestamp >= end; });
    std::stable_sort(events.begin(), events.end(),
                     [](const demand::Event& a, const demand::Event& b) { return a.timestamp < b.timestamp; });
    return events;
}

}  // namespace hybridtess::synth
