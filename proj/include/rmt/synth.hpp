#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rmt/errors.hpp"
#include "rmt/panel.hpp"

namespace rmt {

enum class InjectionKind { CommonFactor, Sine, Quadratic, RandomNoise };

inline std::string injection_kind_name(InjectionKind kind) {
    switch (kind) {
        case InjectionKind::CommonFactor: return "common-factor";
        case InjectionKind::Sine: return "sine";
        case InjectionKind::Quadratic: return "quadratic";
        case InjectionKind::RandomNoise: return "random-noise";
    }
    throw ConfigError("unknown injection kind");
}

inline InjectionKind injection_kind_from_name(const std::string& name) {
    if (name == "common-factor") return InjectionKind::CommonFactor;
    if (name == "sine") return InjectionKind::Sine;
    if (name == "quadratic") return InjectionKind::Quadratic;
    if (name == "random-noise") return InjectionKind::RandomNoise;
    throw ConfigError("unknown injection kind \"" + name + "\"");
}

struct InjectionSpec {
    std::vector<int> targets;
    int start = 0;  // observation indices, half-open [start, end)
    int end = 0;
    InjectionKind kind = InjectionKind::CommonFactor;
    double rho = 0.0;  // common-factor strength in (0, 1]
    std::uint64_t seed = 0;
};

// Geometric random walks: T_i(t) = round(B exp(Σ ε)), ε ~ Normal(0, 0.05²),
// so log-returns are i.i.d. Gaussian and the correlation matrix is a pure
// finite-sample noise draw.
inline TrafficPanel generate_null(int n, int l, std::uint64_t seed) {
    if (n < 2) throw ConfigError("null panel needs N >= 2");
    if (l < n + 2) throw ConfigError("null panel needs L >= N + 2");
    constexpr double base = 1e5;
    constexpr double step_sigma = 0.05;
    constexpr long long t0 = 1000000000;
    constexpr long long dt = 300;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, step_sigma);
    TrafficPanel panel;
    panel.labels.reserve(static_cast<std::size_t>(n));
    panel.timestamps.reserve(static_cast<std::size_t>(l));
    for (int t = 0; t < l; ++t) panel.timestamps.push_back(t0 + dt * t);
    panel.counts.resize(n, l);
    for (int i = 0; i < n; ++i) {
        panel.labels.push_back("s" + std::to_string(i));
        double x = 0.0;
        panel.counts(i, 0) = std::round(base);
        for (int t = 1; t < l; ++t) {
            x += step(rng);
            panel.counts(i, t) = std::round(base * std::exp(x));
        }
    }
    return panel;
}

namespace detail {

inline void validate_injection(const TrafficPanel& panel, const InjectionSpec& spec) {
    if (spec.start < 0 || spec.end > panel.l_raw() || spec.start > spec.end)
        throw SpanOutOfBounds("injection span [" + std::to_string(spec.start) + ", " +
                              std::to_string(spec.end) + ") out of bounds for " +
                              std::to_string(panel.l_raw()) + " observations");
    std::set<int> seen;
    for (int i : spec.targets) {
        if (i < 0 || i >= panel.n())
            throw IndexOutOfBounds("target series " + std::to_string(i) + " out of range");
        if (!seen.insert(i).second)
            throw IndexOutOfBounds("target series " + std::to_string(i) + " repeated");
    }
    if (spec.kind == InjectionKind::CommonFactor && !(spec.rho > 0.0 && spec.rho <= 1.0))
        throw ConfigError("common-factor strength must be in (0, 1]");
}

inline double log_count(double count) { return std::log1p(count); }
inline double from_log_count(double x) { return std::max(0.0, std::round(std::expm1(x))); }

}  // namespace detail

// Rewrite the targeted series inside the span only; every other entry of the
// panel is returned bit-identical.
inline TrafficPanel inject(const TrafficPanel& panel, const InjectionSpec& spec) {
    detail::validate_injection(panel, spec);
    TrafficPanel out = panel;
    const int s = spec.start;
    const int e = spec.end;
    if (s == e || spec.targets.empty()) return out;
    std::mt19937_64 rng(spec.seed);

    switch (spec.kind) {
        case InjectionKind::CommonFactor: {
            if (e - s < 2) return out;
            // One shared standard-normal step stream; each target mixes it
            // into its own log-steps at its own step scale, anchored at the
            // span start so the entry level is preserved.
            std::normal_distribution<double> normal(0.0, 1.0);
            std::vector<double> shared(static_cast<std::size_t>(e - s - 1));
            for (auto& z : shared) z = normal(rng);
            for (int i : spec.targets) {
                std::vector<double> d(static_cast<std::size_t>(e - s - 1));
                for (int t = s + 1; t < e; ++t)
                    d[static_cast<std::size_t>(t - s - 1)] =
                        detail::log_count(panel.counts(i, t)) - detail::log_count(panel.counts(i, t - 1));
                double mean = 0.0;
                for (double v : d) mean += v;
                mean /= static_cast<double>(d.size());
                double var = 0.0;
                for (double v : d) var += (v - mean) * (v - mean);
                const double scale = std::sqrt(var / static_cast<double>(d.size()));
                const double keep = std::sqrt(1.0 - spec.rho * spec.rho);
                double x = detail::log_count(panel.counts(i, s));
                for (int t = s + 1; t < e; ++t) {
                    x += keep * d[static_cast<std::size_t>(t - s - 1)] +
                         spec.rho * scale * shared[static_cast<std::size_t>(t - s - 1)];
                    out.counts(i, t) = detail::from_log_count(x);
                }
            }
            break;
        }
        case InjectionKind::Sine: {
            constexpr double amplitude = 0.1;
            constexpr double period = 24.0;
            for (int t = s; t < e; ++t) {
                const double add = amplitude * std::sin(2.0 * M_PI * (t - s) / period);
                if (add == 0.0) continue;
                for (int i : spec.targets)
                    out.counts(i, t) = detail::from_log_count(detail::log_count(panel.counts(i, t)) + add);
            }
            break;
        }
        case InjectionKind::Quadratic: {
            if (e - s < 2) return out;
            constexpr double peak = 0.1;
            const double alpha = peak / (static_cast<double>(e - 1 - s) * (e - 1 - s));
            for (int t = s + 1; t < e; ++t) {
                const double add = alpha * (t - s) * (t - s);
                for (int i : spec.targets)
                    out.counts(i, t) = detail::from_log_count(detail::log_count(panel.counts(i, t)) + add);
            }
            break;
        }
        case InjectionKind::RandomNoise: {
            // Fresh null-model walks anchored at each target's span-start
            // level, erasing whatever correlation the span carried.
            std::normal_distribution<double> step(0.0, 0.05);
            for (int i : spec.targets) {
                double x = detail::log_count(panel.counts(i, s));
                for (int t = s + 1; t < e; ++t) {
                    x += step(rng);
                    out.counts(i, t) = detail::from_log_count(x);
                }
            }
            break;
        }
    }
    return out;
}

// Boolean (series x time) anomaly mask: the union of target-by-span
// rectangles of the given specs.
inline Eigen::MatrixXi ground_truth(const std::vector<InjectionSpec>& specs, int n, int l) {
    Eigen::MatrixXi mask = Eigen::MatrixXi::Zero(n, l);
    for (const auto& spec : specs) {
        for (int i : spec.targets) {
            if (i < 0 || i >= n) throw IndexOutOfBounds("target series " + std::to_string(i));
            for (int t = spec.start; t < spec.end; ++t) {
                if (t < 0 || t >= l) throw SpanOutOfBounds("span index " + std::to_string(t));
                mask(i, t) = 1;
            }
        }
    }
    return mask;
}

}  // namespace rmt
