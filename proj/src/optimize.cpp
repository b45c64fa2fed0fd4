// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include "optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "error.hpp"

namespace hybridtess::optimize {

std::vector<double> Box::clamp(std::vector<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::clamp(x[i], lower[i], upper[i]);
    }
    return x;
}

Result nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> start,
                   const Box& box, int max_evaluations, double initial_step) {
    const std::size_t d = start.size();
    require(box.lower.size() == d && box.upper.size() == d, ErrorKind::Domain, "nelder-mead: box dimension");
    int evals = 0;
    const auto eval = [&](std::vector<double>& x) {
        x = box.clamp(std::move(x));
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> simplex(d + 1, box.clamp(std::move(start)));
    std::vector<double> values(d + 1);
    for (std::size_t i = 0; i < d; ++i) {
        auto& v = simplex[i + 1];
        // Step inward when the start sits on the upper face.
        v[i] = v[i] + initial_step <= box.upper[i] ? v[i] + initial_step : v[i] - initial_step;
    }
    for (std::size_t i = 0; i <= d; ++i) {
        values[i] = eval(simplex[i]);
    }

    std::vector<std::size_t> order(d + 1);
    while (evals < max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[d - (d > 0 ? 1 : 0)];
        if (std::abs(values[worst] - values[best]) <= 1e-12 * (std::abs(values[best]) + 1e-12)) {
            break;
        }

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i : order) {
            if (i == worst) {
                continue;
            }
            for (std::size_t k = 0; k < d; ++k) {
                centroid[k] += simplex[i][k] / static_cast<double>(d);
            }
        }
        const auto along = [&](double t) {
            std::vector<double> p(d);
            for (std::size_t k = 0; k < d; ++k) {
                p[k] = centroid[k] + t * (simplex[worst][k] - centroid[k]);
            }
            return p;
        };

        auto reflected = along(-1.0);
        const double fr = eval(reflected);
        if (fr < values[best]) {
            auto expanded = along(-2.0);
            const double fe = eval(expanded);
            if (fe < fr) {
                simplex[worst] = std::move(expanded);
                values[worst] = fe;
            } else {
                simplex[worst] = std::move(reflected);
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second]) {
            simplex[worst] = std::move(reflected);
            values[worst] = fr;
            continue;
        }
        auto contracted = fr < values[worst] ? along(-0.5) : along(0.5);
        const double fc = eval(contracted);
        if (fc < std::min(fr, values[worst])) {
            simplex[worst] = std::move(contracted);
            values[worst] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == best) {
                continue;
            }
            for (std::size_t k = 0; k < d; ++k) {
                simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
            }
            values[i] = eval(simplex[i]);
        }
    }

    const auto it = std::min_element(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(it - values.begin());
    return {simplex[idx], values[idx], evals};
}

Result multi_start(const std::function<double(std::span<const double>)>& f,
                   const std::vector<std::vector<double>>& starts, const Box& box, int max_evaluations_each) {
    require(!starts.empty(), ErrorKind::Domain, "multi_start: no starting points");
    Result best;
    best.value = std::numeric_limits<double>::infinity();
    int total = 0;
    for (const auto& s : starts) {
        auto r = nelder_mead(f, s, box, max_evaluations_each);
        total += r.evaluations;
        if (best.x.empty() || r.value < best.value) {
            best = std::move(r);
        }
    }
    best.evaluations = total;
    return best;
}

}  // namespace hybridtess::optimize
