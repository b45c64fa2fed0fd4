// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include "models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "error.hpp"
#include "metrics.hpp"
#include "optimize.hpp"
#include "stl.hpp"

namespace hybridtess::models {

namespace {

constexpr double kGainLo = 1e-4;
constexpr double kGainHi = 0.9999;
constexpr int kMaxEvaluations = 500;

void require_finite(std::span<const double> y, const char* who) {
    for (double v : y) {
        require(std::isfinite(v), ErrorKind::Domain, std::string(who) + ": non-finite value in series");
    }
}

std::vector<std::vector<double>> deterministic_starts(std::size_t dims) {
    std::vector<std::vector<double>> starts;
    for (double v : {0.1, 0.3, 0.7}) {
        starts.emplace_back(dims, v);
    }
    return starts;
}

std::vector<double> residuals_from(std::span<const double> y, std::span<const double> fc, std::size_t warmup) {
    std::vector<double> r;
    for (std::size_t t = warmup; t < y.size(); ++t) {
        r.push_back(y[t] - fc[t - warmup]);
    }
    return r;
}

double mean_of(std::span<const double> y) {
    return std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
}

// ---------------------------------------------------------------- baseline

class Baseline final : public Forecaster {
public:
    Baseline(std::span<const double> y, std::size_t m, std::size_t n_seasons)
        : m_(m), n_seasons_(n_seasons), history_(y.begin(), y.end()) {
        fitted_length_ = y.size();
        residuals_ = residuals_from(y, one_step(y, m), m);
    }

    Kind kind() const override { return Kind::Baseline; }
    std::string name() const override { return "baseline"; }
    Params params() const override { return {{"m", static_cast<double>(m_)}, {"n_seasons", static_cast<double>(n_seasons_)}}; }
    std::vector<std::size_t> periods() const override { return {m_}; }

    std::vector<double> forecast(std::size_t h) const override {
        std::vector<double> out;
        const std::size_t n = history_.size();
        for (std::size_t step = 1; step <= h; ++step) {
            const std::size_t target = n + step - 1;
            double sum = 0.0;
            std::size_t used = 0;
            for (std::size_t i = 1; used < n_seasons_ && i * m_ <= target; ++i) {
                const std::size_t idx = target - i * m_;
                if (idx < n) {
                    sum += history_[idx];
                    ++used;
                }
            }
            out.push_back(used > 0 ? sum / static_cast<double>(used) : history_.back());
        }
        return out;
    }

    std::vector<double> one_step(std::span<const double> y, std::size_t from) const override {
        std::vector<double> out;
        for (std::size_t t = from; t < y.size(); ++t) {
            double sum = 0.0;
            std::size_t used = 0;
            for (std::size_t i = 1; i <= n_seasons_ && i * m_ <= t; ++i) {
                sum += y[t - i * m_];
                ++used;
            }
            if (used > 0) {
                out.push_back(sum / static_cast<double>(used));
            } else {
                out.push_back(t > 0 ? y[t - 1] : y[0]);
            }
        }
        return out;
    }

private:
    std::size_t m_;
    std::size_t n_seasons_;
    std::vector<double> history_;
};

// ---------------------------------------------------------------- simple benchmarks

class Simple final : public Forecaster {
public:
    Simple(std::span<const double> y, Kind kind, std::size_t m) : kind_(kind), m_(m), history_(y.begin(), y.end()) {
        fitted_length_ = y.size();
        const std::size_t warmup = kind == Kind::SeasonalNaive ? m : (kind == Kind::Drift ? 2 : 1);
        residuals_ = residuals_from(y, one_step(y, warmup), warmup);
    }

    Kind kind() const override { return kind_; }
    std::string name() const override {
        switch (kind_) {
            case Kind::Naive: return "naive";
            case Kind::SeasonalNaive: return "snaive";
            default: return "drift";
        }
    }
    Params params() const override {
        if (kind_ == Kind::SeasonalNaive) {
            return {{"m", static_cast<double>(m_)}};
        }
        return {};
    }
    std::vector<std::size_t> periods() const override {
        return kind_ == Kind::SeasonalNaive ? std::vector<std::size_t>{m_} : std::vector<std::size_t>{};
    }

    std::vector<double> forecast(std::size_t h) const override {
        const std::size_t n = history_.size();
        std::vector<double> out;
        for (std::size_t step = 1; step <= h; ++step) {
            switch (kind_) {
                case Kind::Naive:
                    out.push_back(history_.back());
                    break;
                case Kind::SeasonalNaive: {
                    const std::size_t k = (step - 1) / m_ + 1;
                    out.push_back(history_[n + step - k * m_ - 1]);
                    break;
                }
                default: {
                    const double slope = (history_.back() - history_.front()) / static_cast<double>(n - 1);
                    out.push_back(history_.back() + static_cast<double>(step) * slope);
                }
            }
        }
        return out;
    }

    std::vector<double> one_step(std::span<const double> y, std::size_t from) const override {
        std::vector<double> out;
        for (std::size_t t = from; t < y.size(); ++t) {
            if (t == 0) {
                out.push_back(y[0]);
                continue;
            }
            switch (kind_) {
                case Kind::Naive:
                    out.push_back(y[t - 1]);
                    break;
                case Kind::SeasonalNaive:
                    out.push_back(t >= m_ ? y[t - m_] : y[t - 1]);
                    break;
                default:
                    out.push_back(t >= 2 ? y[t - 1] + (y[t - 1] - y[0]) / static_cast<double>(t - 1) : y[t - 1]);
            }
        }
        return out;
    }

private:
    Kind kind_;
    std::size_t m_;
    std::vector<double> history_;
};

// ---------------------------------------------------------------- Holt-Winters

struct HwState {
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> season;
};

class HoltWinters final : public Forecaster {
public:
    HoltWinters(std::span<const double> y, std::size_t m, double alpha, double beta, double gamma, HwState init)
        : m_(m), alpha_(alpha), beta_(beta), gamma_(gamma), init_(std::move(init)) {
        fitted_length_ = y.size();
        final_ = init_;
        const auto fc = run(y, 0, final_);
        residuals_ = residuals_from(y, fc, 0);
    }

    /// One-step forecasts for t >= from; `state` ends after the last observation.
    std::vector<double> run(std::span<const double> y, std::size_t from, HwState& state) const {
        std::vector<double> out;
        out.reserve(y.size() - std::min(from, y.size()));
        for (std::size_t t = 0; t < y.size(); ++t) {
            double& s = state.season[t % m_];
            const double yhat = state.level + state.trend + s;
            if (t >= from) {
                out.push_back(yhat);
            }
            const double prev = state.level;
            state.level = alpha_ * (y[t] - s) + (1.0 - alpha_) * (state.level + state.trend);
            state.trend = beta_ * (state.level - prev) + (1.0 - beta_) * state.trend;
            s = gamma_ * (y[t] - state.level) + (1.0 - gamma_) * s;
        }
        return out;
    }

    Kind kind() const override { return Kind::HoltWinters; }
    std::string name() const override { return "hw"; }
    Params params() const override {
        return {{"alpha", alpha_}, {"beta", beta_}, {"gamma", gamma_}, {"m", static_cast<double>(m_)}};
    }
    std::vector<std::size_t> periods() const override { return {m_}; }

    std::vector<double> forecast(std::size_t h) const override {
        std::vector<double> out;
        for (std::size_t step = 1; step <= h; ++step) {
            out.push_back(final_.level + static_cast<double>(step) * final_.trend +
                          final_.season[(fitted_length_ + step - 1) % m_]);
        }
        return out;
    }

    std::vector<double> one_step(std::span<const double> y, std::size_t from) const override {
        HwState state = init_;
        return run(y, from, state);
    }

private:
    std::size_t m_;
    double alpha_;
    double beta_;
    double gamma_;
    HwState init_;
    HwState final_;
};

HwState hw_initial_state(std::span<const double> y, std::size_t m) {
    const double first = mean_of(y.subspan(0, m));
    const double second = mean_of(y.subspan(m, m));
    HwState s;
    s.level = first;
    s.trend = (second - first) / static_cast<double>(m);
    s.season.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        s.season[i] = ((y[i] - first) + (y[m + i] - second)) / 2.0;
    }
    return s;
}

double hw_sse(std::span<const double> y, std::size_t m, double a, double b, double g, const HwState& init,
              std::vector<double>& season) {
    season = init.season;
    double level = init.level;
    double trend = init.trend;
    double sse = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        double& s = season[t % m];
        const double e = y[t] - (level + trend + s);
        sse += e * e;
        const double prev = level;
        level = a * (y[t] - s) + (1.0 - a) * (level + trend);
        trend = b * (level - prev) + (1.0 - b) * trend;
        s = g * (y[t] - level) + (1.0 - g) * s;
    }
    return sse;
}

// ---------------------------------------------------------------- STL + inner models

struct Inner {
    StlInner kind = StlInner::Naive;
    double slope = 0.0;  // drift
    double alpha = 0.5;  // ses
    double mean = 0.0;   // ar
    std::vector<double> phi;

    std::string name() const {
        switch (kind) {
            case StlInner::Naive: return "naive";
            case StlInner::Drift: return "drift";
            case StlInner::Ses: return "ses";
            default: return "ar" + std::to_string(phi.size());
        }
    }

    /// One-step forecasts of x[t] for t in [from, x.size()).
    std::vector<double> one_step(std::span<const double> x, std::size_t from) const {
        std::vector<double> out;
        if (kind == StlInner::Ses) {
            double level = x[0];
            for (std::size_t t = 0; t < x.size(); ++t) {
                if (t >= from) {
                    out.push_back(level);
                }
                level = alpha * x[t] + (1.0 - alpha) * level;
            }
            return out;
        }
        for (std::size_t t = from; t < x.size(); ++t) {
            if (t == 0) {
                out.push_back(kind == StlInner::Ar ? mean : x[0]);
                continue;
            }
            switch (kind) {
                case StlInner::Naive:
                    out.push_back(x[t - 1]);
                    break;
                case StlInner::Drift:
                    out.push_back(x[t - 1] + slope);
                    break;
                default: {
                    double v = mean;
                    for (std::size_t i = 0; i < phi.size() && i < t; ++i) {
                        v += phi[i] * (x[t - 1 - i] - mean);
                    }
                    out.push_back(v);
                }
            }
        }
        return out;
    }

    std::vector<double> forecast(std::span<const double> x, std::size_t h) const {
        std::vector<double> out;
        if (kind == StlInner::Ses) {
            double level = x[0];
            for (double v : x) {
                level = alpha * v + (1.0 - alpha) * level;
            }
            out.assign(h, level);
            return out;
        }
        if (kind == StlInner::Ar) {
            std::vector<double> path(x.begin(), x.end());
            for (std::size_t step = 0; step < h; ++step) {
                double v = mean;
                for (std::size_t i = 0; i < phi.size() && i < path.size(); ++i) {
                    v += phi[i] * (path[path.size() - 1 - i] - mean);
                }
                path.push_back(v);
                out.push_back(v);
            }
            return out;
        }
        for (std::size_t step = 1; step <= h; ++step) {
            out.push_back(x.back() + (kind == StlInner::Drift ? static_cast<double>(step) * slope : 0.0));
        }
        return out;
    }
};

/// Levinson-Durbin on sample autocovariances; returns phi and innovation variance per order.
std::vector<std::pair<std::vector<double>, double>> yule_walker(std::span<const double> x, std::size_t max_order) {
    const std::size_t n = x.size();
    const double mean = mean_of(x);
    std::vector<double> acov(max_order + 1, 0.0);
    for (std::size_t k = 0; k <= max_order; ++k) {
        for (std::size_t t = k; t < n; ++t) {
            acov[k] += (x[t] - mean) * (x[t - k] - mean);
        }
        acov[k] /= static_cast<double>(n);
    }
    std::vector<std::pair<std::vector<double>, double>> out;
    if (acov[0] <= 0.0) {
        return out;
    }
    std::vector<double> phi;
    double var = acov[0];
    for (std::size_t p = 1; p <= max_order; ++p) {
        double num = acov[p];
        for (std::size_t j = 0; j + 1 < p; ++j) {
            num -= phi[j] * acov[p - 1 - j];
        }
        const double k = num / var;
        std::vector<double> next(p);
        for (std::size_t j = 0; j + 1 < p; ++j) {
            next[j] = phi[j] - k * phi[p - 2 - j];
        }
        next[p - 1] = k;
        phi = std::move(next);
        var *= (1.0 - k * k);
        if (var <= 0.0) {
            break;
        }
        out.emplace_back(phi, var);
    }
    return out;
}

Inner fit_inner(std::span<const double> x, StlInner kind) {
    Inner in;
    in.kind = kind;
    const std::size_t n = x.size();
    switch (kind) {
        case StlInner::Naive:
            break;
        case StlInner::Drift:
            in.slope = (x[n - 1] - x[0]) / static_cast<double>(n - 1);
            break;
        case StlInner::Ses: {
            const auto sse = [&](std::span<const double> p) {
                double level = x[0];
                double s = 0.0;
                for (double v : x) {
                    const double e = v - level;
                    s += e * e;
                    level = p[0] * v + (1.0 - p[0]) * level;
                }
                return s;
            };
            const auto r = optimize::multi_start(sse, deterministic_starts(1), {{kGainLo}, {kGainHi}}, kMaxEvaluations);
            in.alpha = r.x[0];
            break;
        }
        case StlInner::Ar: {
            in.mean = mean_of(x);
            const auto fits = yule_walker(x, 4);
            double best_aic = std::numeric_limits<double>::infinity();
            for (const auto& [phi, var] : fits) {
                const double aic = static_cast<double>(n) * std::log(var) + 2.0 * static_cast<double>(phi.size());
                if (aic < best_aic) {
                    best_aic = aic;
                    in.phi = phi;
                }
            }
            if (in.phi.empty()) {
                in.phi = {0.0};
            }
            break;
        }
    }
    return in;
}

class Stl final : public Forecaster {
public:
    Stl(std::span<const double> y, std::size_t m, StlInner inner_kind) : m_(m) {
        fitted_length_ = y.size();
        auto d = stl::decompose(y, m);
        seasonal_ = std::move(d.seasonal);
        trend_ = std::move(d.trend);
        remainder_ = std::move(d.remainder);
        adjusted_.resize(y.size());
        for (std::size_t t = 0; t < y.size(); ++t) {
            adjusted_[t] = trend_[t] + remainder_[t];
        }
        inner_ = fit_inner(adjusted_, inner_kind);
        const std::size_t warmup = inner_kind == StlInner::Ar ? inner_.phi.size() : 1;
        residuals_ = residuals_from(y, one_step(y, warmup), warmup);
    }

    const std::vector<double>& seasonal() const { return seasonal_; }
    const std::vector<double>& trend() const { return trend_; }
    const std::vector<double>& remainder() const { return remainder_; }

    /// Fitted seasonal component inside the window, seasonal-naive continuation beyond it.
    double seasonal_at(std::size_t t) const {
        const std::size_t n = fitted_length_;
        if (t < n) {
            return seasonal_[t];
        }
        const std::size_t h = t - n + 1;
        const std::size_t k = (h - 1) / m_ + 1;
        return seasonal_[n + h - k * m_ - 1];
    }

    Kind kind() const override { return Kind::Stl; }
    std::string name() const override { return "stl(" + inner_.name() + ")"; }
    Params params() const override {
        Params p{{"m", static_cast<double>(m_)}};
        switch (inner_.kind) {
            case StlInner::Drift: p.emplace_back("slope", inner_.slope); break;
            case StlInner::Ses: p.emplace_back("alpha", inner_.alpha); break;
            case StlInner::Ar:
                p.emplace_back("mean", inner_.mean);
                for (std::size_t i = 0; i < inner_.phi.size(); ++i) {
                    p.emplace_back("phi" + std::to_string(i + 1), inner_.phi[i]);
                }
                break;
            default: break;
        }
        return p;
    }
    std::vector<std::size_t> periods() const override { return {m_}; }

    std::vector<double> forecast(std::size_t h) const override {
        auto ns = inner_.forecast(adjusted_, h);
        for (std::size_t step = 1; step <= h; ++step) {
            ns[step - 1] += seasonal_at(fitted_length_ + step - 1);
        }
        return ns;
    }

    std::vector<double> one_step(std::span<const double> y, std::size_t from) const override {
        std::vector<double> adjusted(y.size());
        for (std::size_t t = 0; t < y.size(); ++t) {
            adjusted[t] = y[t] - seasonal_at(t);
        }
        auto out = inner_.one_step(adjusted, from);
        for (std::size_t t = from; t < y.size(); ++t) {
            out[t - from] += seasonal_at(t);
        }
        return out;
    }

private:
    std::size_t m_;
    std::vector<double> seasonal_;
    std::vector<double> trend_;
    std::vector<double> remainder_;
    std::vector<double> adjusted_;
    Inner inner_;
};

// ---------------------------------------------------------------- TBATS-lite

struct TbatsScratch {
    std::vector<std::vector<double>> cos_l;
    std::vector<std::vector<double>> sin_l;
};

TbatsScratch tbats_tables(std::span<const std::size_t> periods, const TbatsState& st) {
    TbatsScratch tab;
    for (std::size_t i = 0; i < periods.size(); ++i) {
        tab.cos_l.emplace_back();
        tab.sin_l.emplace_back();
        for (std::size_t j = 0; j < st.s[i].size(); ++j) {
            const double lambda = 2.0 * std::numbers::pi * static_cast<double>(j + 1) / static_cast<double>(periods[i]);
            tab.cos_l[i].push_back(std::cos(lambda));
            tab.sin_l[i].push_back(std::sin(lambda));
        }
    }
    return tab;
}

/// Runs the recursion over y; returns one-step forecasts for t >= from and
/// leaves `st` holding the state after the last observation. Accumulates SSE
/// into *sse when given.
std::vector<double> tbats_run(std::span<const double> y, std::span<const std::size_t> periods,
                              const TbatsParams& p, TbatsState& st, std::size_t from, double* sse) {
    const auto tab = tbats_tables(periods, st);
    std::vector<double> out;
    if (sse == nullptr) {
        out.reserve(y.size() - std::min(from, y.size()));
    }
    for (std::size_t t = 0; t < y.size(); ++t) {
        // Advance each harmonic one step, then form the seasonal factor.
        double factor = 1.0;
        for (std::size_t i = 0; i < st.s.size(); ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < st.s[i].size(); ++j) {
                const double s = st.s[i][j];
                const double ss = st.s_star[i][j];
                st.s[i][j] = s * tab.cos_l[i][j] + ss * tab.sin_l[i][j];
                st.s_star[i][j] = -s * tab.sin_l[i][j] + ss * tab.cos_l[i][j];
                sum += st.s[i][j];
            }
            factor *= 1.0 + sum;
        }
        const double base = st.level + st.trend;
        const double yhat = base * factor;
        if (sse != nullptr) {
            const double e = y[t] - yhat;
            *sse += e * e;
        } else if (t >= from) {
            out.push_back(yhat);
        }
        const double deseasoned = std::abs(factor) > 1e-12 ? y[t] / factor : base;
        const double prev = st.level;
        st.level = p.alpha * deseasoned + (1.0 - p.alpha) * base;
        st.trend = p.beta * (st.level - prev) + (1.0 - p.beta) * st.trend;
        const double d = std::abs(base) > 1e-12 ? (y[t] - yhat) / base : 0.0;
        for (std::size_t i = 0; i < st.s.size(); ++i) {
            for (double& s : st.s[i]) {
                s += p.gamma[i] * d;
            }
        }
    }
    return out;
}

class TbatsLite final : public Forecaster {
public:
    TbatsLite(std::span<const double> y, std::vector<std::size_t> periods, TbatsParams params, TbatsState init)
        : periods_(std::move(periods)), params_(std::move(params)), init_(std::move(init)) {
        fitted_length_ = y.size();
        final_ = init_;
        const auto fc = tbats_run(y, periods_, params_, final_, 0, nullptr);
        residuals_ = residuals_from(y, fc, 0);
    }

    Kind kind() const override { return Kind::TbatsLite; }
    std::string name() const override { return "tbats"; }
    Params params() const override {
        Params p{{"alpha", params_.alpha}, {"beta", params_.beta}};
        for (std::size_t i = 0; i < periods_.size(); ++i) {
            p.emplace_back("gamma" + std::to_string(i + 1), params_.gamma[i]);
            p.emplace_back("m" + std::to_string(i + 1), static_cast<double>(periods_[i]));
        }
        return p;
    }
    std::vector<std::size_t> periods() const override { return periods_; }

    std::vector<double> forecast(std::size_t h) const override {
        std::vector<double> out;
        for (std::size_t step = 1; step <= h; ++step) {
            double factor = 1.0;
            for (std::size_t i = 0; i < periods_.size(); ++i) {
                double sum = 0.0;
                for (std::size_t j = 0; j < final_.s[i].size(); ++j) {
                    const double lambda = 2.0 * std::numbers::pi * static_cast<double>(j + 1) *
                                          static_cast<double>(step) / static_cast<double>(periods_[i]);
                    sum += final_.s[i][j] * std::cos(lambda) + final_.s_star[i][j] * std::sin(lambda);
                }
                factor *= 1.0 + sum;
            }
            out.push_back((final_.level + static_cast<double>(step) * final_.trend) * factor);
        }
        return out;
    }

    std::vector<double> one_step(std::span<const double> y, std::size_t from) const override {
        TbatsState st = init_;
        return tbats_run(y, periods_, params_, st, from, nullptr);
    }

private:
    std::vector<std::size_t> periods_;
    TbatsParams params_;
    TbatsState init_;
    TbatsState final_;
};

TbatsState tbats_initial_state(std::span<const double> y, std::span<const std::size_t> periods,
                               std::span<const std::size_t> harmonics) {
    const std::size_t big = *std::max_element(periods.begin(), periods.end());
    TbatsState st;
    const double first = mean_of(y.subspan(0, big));
    const double second = mean_of(y.subspan(big, big));
    st.trend = (second - first) / static_cast<double>(big);
    // Level one step before the first observation.
    st.level = first - st.trend * (static_cast<double>(big) + 1.0) / 2.0;
    const std::size_t window = 2 * big;
    std::vector<double> ratio(window);
    for (std::size_t t = 0; t < window; ++t) {
        const double base = st.level + st.trend * static_cast<double>(t + 1);
        ratio[t] = std::abs(base) > 1e-12 ? y[t] / base - 1.0 : 0.0;
    }
    for (std::size_t i = 0; i < periods.size(); ++i) {
        st.s.emplace_back();
        st.s_star.emplace_back();
        for (std::size_t j = 0; j < harmonics[i]; ++j) {
            const double lambda = 2.0 * std::numbers::pi * static_cast<double>(j + 1) / static_cast<double>(periods[i]);
            double a = 0.0;
            double b = 0.0;
            for (std::size_t t = 0; t < window; ++t) {
                a += ratio[t] * std::cos(lambda * static_cast<double>(t));
                b += ratio[t] * std::sin(lambda * static_cast<double>(t));
            }
            a *= 2.0 / static_cast<double>(window);
            b *= 2.0 / static_cast<double>(window);
            // State at t = -1 so that one rotation lands on a*cos(lambda t) + b*sin(lambda t) at t = 0.
            st.s[i].push_back(a * std::cos(lambda) - b * std::sin(lambda));
            st.s_star[i].push_back(a * std::sin(lambda) + b * std::cos(lambda));
        }
    }
    return st;
}

}  // namespace

// ---------------------------------------------------------------- public fitting API

Model fit_baseline(std::span<const double> series, std::size_t m, std::size_t n_seasons) {
    require(m >= 1 && n_seasons >= 1, ErrorKind::Domain, "baseline: m and N must be positive");
    require(series.size() >= m, ErrorKind::Domain, "baseline: series shorter than one season");
    require_finite(series, "baseline");
    return std::make_shared<Baseline>(series, m, n_seasons);
}

Model fit_simple(std::span<const double> series, Kind kind, std::size_t m) {
    require(kind == Kind::Naive || kind == Kind::SeasonalNaive || kind == Kind::Drift, ErrorKind::Domain,
            "fit_simple: not a simple model kind");
    require(series.size() >= 2, ErrorKind::Domain, "simple model: need at least two observations");
    require(kind != Kind::SeasonalNaive || (m >= 1 && series.size() >= m), ErrorKind::Domain,
            "seasonal naive: series shorter than one season");
    require_finite(series, "simple model");
    return std::make_shared<Simple>(series, kind, m);
}

Model fit_holt_winters(std::span<const double> series, std::size_t m) {
    require(m >= 2, ErrorKind::Domain, "holt-winters: period must be at least 2");
    require(series.size() >= 2 * m, ErrorKind::Domain, "holt-winters: need two full seasons");
    require_finite(series, "holt-winters");
    const HwState init = hw_initial_state(series, m);
    std::vector<double> scratch;
    const auto sse = [&](std::span<const double> p) { return hw_sse(series, m, p[0], p[1], p[2], init, scratch); };
    const optimize::Box box{{kGainLo, kGainLo, kGainLo}, {kGainHi, kGainHi, kGainHi}};
    const auto best = optimize::multi_start(sse, deterministic_starts(3), box, kMaxEvaluations);
    return std::make_shared<HoltWinters>(series, m, best.x[0], best.x[1], best.x[2], init);
}

Model fit_stl(std::span<const double> series, std::size_t m, StlInner inner) {
    require(series.size() >= 2 * m + 1, ErrorKind::Domain, "stl: series shorter than 2m + 1");
    require_finite(series, "stl");
    return std::make_shared<Stl>(series, m, inner);
}

std::vector<double> tbats_filter(std::span<const double> series, std::span<const std::size_t> periods,
                                 const TbatsParams& params, TbatsState state) {
    require(params.gamma.size() == periods.size() && state.s.size() == periods.size() &&
                state.s_star.size() == periods.size(),
            ErrorKind::Domain, "tbats: parameter/period count mismatch");
    return tbats_run(series, periods, params, state, 0, nullptr);
}

Model fit_tbats_lite(std::span<const double> series, std::vector<std::size_t> periods,
                     std::vector<std::size_t> harmonics) {
    require(!periods.empty() && periods.size() == harmonics.size(), ErrorKind::Domain,
            "tbats: one harmonic count per period");
    for (std::size_t i = 0; i < periods.size(); ++i) {
        require(periods[i] >= 2 && harmonics[i] >= 1 && 2 * harmonics[i] <= periods[i], ErrorKind::Domain,
                "tbats: need 1 <= harmonics <= period / 2");
    }
    const std::size_t big = *std::max_element(periods.begin(), periods.end());
    require(series.size() >= 2 * big, ErrorKind::Domain, "tbats: series shorter than two longest seasons");
    require_finite(series, "tbats");
    for (double v : series) {
        require(v > 0.0, ErrorKind::Domain, "tbats: multiplicative seasonality needs strictly positive values");
    }

    const TbatsState init = tbats_initial_state(series, periods, harmonics);
    const std::size_t dims = 2 + periods.size();
    const auto unpack = [&](std::span<const double> x) {
        TbatsParams p;
        p.alpha = x[0];
        p.beta = x[1];
        p.gamma.assign(x.begin() + 2, x.end());
        return p;
    };
    const auto sse = [&](std::span<const double> x) {
        TbatsState st = init;
        double total = 0.0;
        tbats_run(series, periods, unpack(x), st, 0, &total);
        return total;
    };
    // The trend gain starts small; a large beta on a multiplicative model diverges easily.
    std::vector<std::vector<double>> starts = deterministic_starts(dims);
    for (auto& s : starts) {
        s[1] = std::min(s[1], 0.1);
    }
    const optimize::Box box{std::vector<double>(dims, kGainLo), std::vector<double>(dims, kGainHi)};
    const auto best = optimize::multi_start(sse, starts, box, kMaxEvaluations);
    return std::make_shared<TbatsLite>(series, std::move(periods), unpack(best.x), init);
}

// ---------------------------------------------------------------- specs and selection

std::string Spec::name() const {
    switch (kind) {
        case Kind::Baseline: return "baseline";
        case Kind::Naive: return "naive";
        case Kind::SeasonalNaive: return "snaive";
        case Kind::Drift: return "drift";
        case Kind::HoltWinters: return "hw";
        case Kind::TbatsLite: return "tbats";
        case Kind::Stl:
            switch (inner) {
                case StlInner::Naive: return "stl-naive";
                case StlInner::Drift: return "stl-drift";
                case StlInner::Ses: return "stl-ses";
                case StlInner::Ar: return "stl-ar";
            }
    }
    return "baseline";
}

Spec Spec::parse(const std::string& text) {
    static const std::vector<Spec> all{{Kind::Baseline},
                                       {Kind::Naive},
                                       {Kind::SeasonalNaive},
                                       {Kind::Drift},
                                       {Kind::HoltWinters},
                                       {Kind::TbatsLite},
                                       {Kind::Stl, StlInner::Naive},
                                       {Kind::Stl, StlInner::Drift},
                                       {Kind::Stl, StlInner::Ses},
                                       {Kind::Stl, StlInner::Ar}};
    for (const auto& s : all) {
        if (s.name() == text) {
            return s;
        }
    }
    fail(ErrorKind::Config, "unknown model kind '" + text + "'");
}

Model fit(const Spec& spec, std::span<const double> training, const FitConfig& config) {
    switch (spec.kind) {
        case Kind::Baseline: return fit_baseline(training, config.baseline_season, config.baseline_seasons);
        case Kind::Naive:
        case Kind::Drift: return fit_simple(training, spec.kind);
        case Kind::SeasonalNaive: return fit_simple(training, spec.kind, config.season);
        case Kind::HoltWinters: return fit_holt_winters(training, config.season);
        case Kind::Stl: return fit_stl(training, config.season, spec.inner);
        case Kind::TbatsLite: return fit_tbats_lite(training, config.tbats_periods, config.tbats_harmonics);
    }
    fail(ErrorKind::Domain, "unknown model kind");
}

std::vector<double> to_demand_scale(std::span<const double> values, const std::optional<demand::BoxCox>& transform) {
    std::vector<double> out(values.begin(), values.end());
    for (double& v : out) {
        if (transform) {
            v = transform->inverse(v);
        }
        if (!(v >= 0.0)) {
            v = 0.0;
        }
    }
    return out;
}

Selection select_model(std::span<const double> training, std::span<const double> validation,
                       const std::vector<Spec>& candidates, const FitConfig& config,
                       const std::optional<demand::BoxCox>& transform) {
    std::vector<double> joined(training.begin(), training.end());
    joined.insert(joined.end(), validation.begin(), validation.end());
    const auto actual = to_demand_scale(validation, transform);

    const auto score = [&](const Model& model) {
        const auto fc = to_demand_scale(model->one_step(joined, training.size()), transform);
        try {
            return metrics::smape(actual, fc);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::UndefinedMetric) {
                throw;
            }
            return 0.0;  // all-zero validation window matched by all-zero forecasts
        }
    };

    Selection sel;
    sel.model = fit({Kind::Baseline}, training, config);
    sel.validation_smape = score(sel.model);
    sel.scores.push_back({"baseline", sel.validation_smape});
    for (const auto& spec : candidates) {
        if (spec.kind == Kind::Baseline) {
            continue;
        }
        Model model;
        try {
            model = fit(spec, training, config);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Domain) {
                throw;
            }
            sel.scores.push_back({spec.name(), std::nullopt});
            continue;
        }
        const double s = score(model);
        sel.scores.push_back({spec.name(), s});
        if (s < sel.validation_smape) {
            sel.model = std::move(model);
            sel.validation_smape = s;
        }
    }
    return sel;
}

}  // namespace hybridtess::models
