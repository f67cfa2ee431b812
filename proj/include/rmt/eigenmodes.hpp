#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "rmt/errors.hpp"
#include "rmt/panel.hpp"

namespace rmt {

namespace detail {

inline void require_unit_norm(const Vector& u) {
    if (std::abs(u.norm() - 1.0) > 1e-8)
        throw NotNormalized("vector norm " + fmt_double(u.norm()) + " is not 1");
}

}  // namespace detail

// Inverse participation ratio Σ u_l^4 of a unit vector; 1/N (uniform) .. 1
// (one-hot). Its reciprocal estimates the number of significant components.
inline double ipr(const Vector& u) {
    detail::require_unit_norm(u);
    return u.array().square().square().sum();
}

// The round(1/IPR) labels with the largest |u_l|, strongest first.
inline std::vector<std::string> significant_participants(const Vector& u,
                                                         const std::vector<std::string>& labels) {
    if (u.size() != static_cast<Eigen::Index>(labels.size()))
        throw DimensionMismatch("vector length does not match label count");
    const double i = ipr(u);
    const int count = std::min<int>(static_cast<int>(u.size()),
                                    static_cast<int>(std::llround(1.0 / i)));
    std::vector<int> order(static_cast<std::size_t>(u.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(u(a)) > std::abs(u(b)); });
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) out.push_back(labels[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]);
    return out;
}

struct ComponentStats {
    int eigenvector_index = -1;
    double kurtosis = 0.0;           // Pearson (Gaussian reference: 3)
    double positive_fraction = 0.0;
    std::vector<int> histogram;      // 30 bins over [-4, 4] of sqrt(N)-scaled components
    double histogram_lo = -4.0;
    double histogram_hi = 4.0;
};

// Moments of the sqrt(N)-rescaled components, for which a delocalized
// (Gaussian) eigenvector has unit variance.
inline ComponentStats component_stats(const Vector& u, int eigenvector_index = -1) {
    detail::require_unit_norm(u);
    const int n = static_cast<int>(u.size());
    ComponentStats stats;
    stats.eigenvector_index = eigenvector_index;
    const Eigen::ArrayXd w = u.array() * std::sqrt(static_cast<double>(n));
    const double m2 = w.square().sum() / n;  // = 1 by unit norm
    const double m4 = w.square().square().sum() / n;
    stats.kurtosis = m4 / (m2 * m2);
    stats.positive_fraction = static_cast<double>((u.array() > 0.0).count()) / n;
    stats.histogram.assign(30, 0);
    const double width = (stats.histogram_hi - stats.histogram_lo) / 30.0;
    for (int i = 0; i < n; ++i) {
        const int bin = static_cast<int>(std::floor((w(i) - stats.histogram_lo) / width));
        if (bin >= 0 && bin < 30) ++stats.histogram[static_cast<std::size_t>(bin)];
    }
    return stats;
}

struct ProjectionSeries {
    std::vector<double> values;  // length L
    int source_index = -1;
    double sigma = 0.0;          // population std of the projection
};

// Eigenvector-weighted sum of the raw rate changes at each time step.
inline ProjectionSeries project(const ReturnsPanel& returns, const Vector& u,
                                int source_index = -1) {
    if (u.size() != returns.g.rows())
        throw DimensionMismatch("vector length " + std::to_string(u.size()) +
                                " does not match panel N = " + std::to_string(returns.g.rows()));
    if (u.norm() < 1e-12) throw NotNormalized("projection vector has zero norm");
    ProjectionSeries proj;
    proj.source_index = source_index;
    const Eigen::RowVectorXd row = u.transpose() * returns.g;
    proj.values.assign(row.data(), row.data() + row.size());
    const double l = static_cast<double>(row.size());
    const double mean = row.sum() / l;
    proj.sigma = std::sqrt((row.array() - mean).square().sum() / l);
    return proj;
}

struct RegressionResult {
    std::vector<double> correlations;  // per-series Pearson r
    int best_index = -1;               // largest |r|, ties to the lowest index
    std::string best_label;
};

// Pearson correlation of the projection against every member series.
inline RegressionResult regress_projection(const ProjectionSeries& proj,
                                           const ReturnsPanel& returns) {
    const int l = returns.l();
    if (static_cast<int>(proj.values.size()) != l)
        throw DimensionMismatch("projection length does not match panel length");
    if (proj.sigma <= 0.0) throw ZeroVariance("projection");
    Eigen::Map<const Eigen::RowVectorXd> p(proj.values.data(), l);
    const double p_mean = p.mean();
    RegressionResult result;
    result.correlations.reserve(static_cast<std::size_t>(returns.n()));
    for (int i = 0; i < returns.n(); ++i) {
        if (returns.sigma(i) <= 0.0) throw ZeroVariance(returns.labels[static_cast<std::size_t>(i)]);
        const double cov =
            ((returns.g.row(i).array() - returns.mean(i)) * (p.array() - p_mean)).sum() / l;
        result.correlations.push_back(cov / (returns.sigma(i) * proj.sigma));
    }
    for (int i = 0; i < returns.n(); ++i) {
        if (result.best_index < 0 ||
            std::abs(result.correlations[static_cast<std::size_t>(i)]) >
                std::abs(result.correlations[static_cast<std::size_t>(result.best_index)]))
            result.best_index = i;
    }
    result.best_label = returns.labels[static_cast<std::size_t>(result.best_index)];
    return result;
}

}  // namespace rmt
