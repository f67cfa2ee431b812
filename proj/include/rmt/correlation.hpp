#pragma once

#include <random>
#include <string>
#include <vector>

#include "rmt/errors.hpp"
#include "rmt/panel.hpp"

namespace rmt {

// Equal-time cross-correlation matrix C = (1/L) g g^T of a normalized panel.
struct CorrelationMatrix {
    std::vector<std::string> labels;
    Matrix values;  // N x N, symmetric, unit diagonal
    int l = 0;      // observations used

    int n() const { return static_cast<int>(values.rows()); }
    double q() const { return static_cast<double>(l) / static_cast<double>(values.rows()); }
};

enum class EnsembleVariant { RandomCorrelation, Goe };

struct EnsembleSpec {
    int n = 0;
    int l = 0;  // used by random-correlation only
    std::uint64_t seed = 0;
    EnsembleVariant variant = EnsembleVariant::RandomCorrelation;
    double v = 1.0;  // GOE scale
};

inline CorrelationMatrix correlation_matrix(const NormalizedPanel& panel) {
    const int n = panel.n();
    const int l = panel.l();
    if (n < 2 || l < 2) throw DimensionMismatch("correlation needs N >= 2 and L >= 2");
    CorrelationMatrix c;
    c.labels = panel.labels;
    c.l = l;
    c.values.resize(n, n);
    // Upper triangle once, mirrored; the diagonal is 1 by the row invariants,
    // pinned exactly so trace(C) = N.
    for (int i = 0; i < n; ++i) {
        c.values(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            const double v = panel.g.row(i).dot(panel.g.row(j)) / l;
            c.values(i, j) = v;
            c.values(j, i) = v;
        }
    }
    return c;
}

// N x L panel of independent standard-normal draws, re-standardized row by
// row so the normalized-panel invariants hold exactly.
inline NormalizedPanel random_normalized_panel(const EnsembleSpec& spec) {
    if (spec.variant != EnsembleVariant::RandomCorrelation)
        throw ConfigError("random_normalized_panel requires the random-correlation variant");
    if (spec.n < 2) throw ConfigError("ensemble needs N >= 2");
    if (spec.l <= spec.n) throw ConfigError("random-correlation ensemble needs L > N");
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    NormalizedPanel panel;
    panel.g.resize(spec.n, spec.l);
    for (int i = 0; i < spec.n; ++i)
        for (int t = 0; t < spec.l; ++t) panel.g(i, t) = normal(rng);
    panel.labels.reserve(static_cast<std::size_t>(spec.n));
    panel.sigma.resize(spec.n);
    for (int i = 0; i < spec.n; ++i) {
        panel.labels.push_back("s" + std::to_string(i));
        panel.sigma(i) = standardize_row(panel.g.row(i));
    }
    return panel;
}

// Symmetric Gaussian matrix: diagonal Normal(0, 2v^2), off-diagonal
// Normal(0, v^2) — the standard orthogonal-ensemble convention.
inline Matrix goe_matrix(const EnsembleSpec& spec) {
    if (spec.variant != EnsembleVariant::Goe) throw ConfigError("goe_matrix requires the goe variant");
    if (spec.n < 1) throw ConfigError("ensemble needs N >= 1");
    if (spec.v <= 0.0) throw ConfigError("GOE scale v must be positive");
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> diag(0.0, spec.v * std::sqrt(2.0));
    std::normal_distribution<double> offdiag(0.0, spec.v);
    Matrix h(spec.n, spec.n);
    for (int i = 0; i < spec.n; ++i) {
        h(i, i) = diag(rng);
        for (int j = i + 1; j < spec.n; ++j) {
            const double v = offdiag(rng);
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

}  // namespace rmt
