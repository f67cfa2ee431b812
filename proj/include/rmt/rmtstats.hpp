#pragma once

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "rmt/errors.hpp"
#include "rmt/numeric.hpp"
#include "rmt/unfolding.hpp"

namespace rmt {

enum class SpacingOrder { Nearest, NextNearest };

struct SpacingSample {
    std::vector<double> values;
    SpacingOrder order = SpacingOrder::Nearest;
    bool rescaled = false;  // true when divided down to ~unit mean
};

// Orthogonal-ensemble nearest-neighbor spacing surmise (unit mean).
inline double wigner_goe_pdf(double s) {
    return M_PI * s / 2.0 * std::exp(-M_PI * s * s / 4.0);
}

// Symplectic-ensemble nearest-neighbor spacing law (unit mean).
inline double gse_pdf(double s) {
    const double coeff = 262144.0 / (729.0 * M_PI * M_PI * M_PI);  // 2^18 / (3^6 π^3)
    return coeff * s * s * s * s * std::exp(-64.0 * s * s / (9.0 * M_PI));
}

// Uncorrelated-spectrum spacing law.
inline double poisson_pdf(double s) { return std::exp(-s); }

inline SpacingSample nn_spacings(const UnfoldedSpectrum& xi) {
    if (xi.n() < 2) throw EmptySample("need at least 2 unfolded eigenvalues");
    SpacingSample sample;
    sample.order = SpacingOrder::Nearest;
    sample.values.reserve(static_cast<std::size_t>(xi.n() - 1));
    for (int k = 0; k + 1 < xi.n(); ++k) sample.values.push_back(xi.xi(k + 1) - xi.xi(k));
    return sample;
}

// Next-nearest spacings halved so the sample mean is ~1, comparable with the
// unit-mean symplectic law.
inline SpacingSample nnn_spacings(const UnfoldedSpectrum& xi) {
    if (xi.n() < 3) throw EmptySample("need at least 3 unfolded eigenvalues");
    SpacingSample sample;
    sample.order = SpacingOrder::NextNearest;
    sample.rescaled = true;
    sample.values.reserve(static_cast<std::size_t>(xi.n() - 2));
    for (int k = 0; k + 2 < xi.n(); ++k) sample.values.push_back((xi.xi(k + 2) - xi.xi(k)) / 2.0);
    return sample;
}

// Divide a sample by its mean (makes the rescaled-sample invariant exact).
inline SpacingSample rescale_to_unit_mean(SpacingSample sample) {
    if (sample.values.empty()) throw EmptySample("cannot rescale an empty sample");
    double mean = 0.0;
    for (double v : sample.values) mean += v;
    mean /= static_cast<double>(sample.values.size());
    if (mean <= 0.0) throw NumericError("sample mean not positive");
    for (double& v : sample.values) v /= mean;
    sample.rescaled = true;
    return sample;
}

// Variance of the eigenvalue count in length-l windows at random centers.
inline double number_variance_empirical(const UnfoldedSpectrum& xi, double l, int n_windows,
                                        std::uint64_t seed) {
    if (l == 0.0) return 0.0;
    if (n_windows < 100) throw ConfigError("number variance needs n_windows >= 100");
    const double lo = xi.xi(0);
    const double hi = xi.xi(xi.n() - 1);
    if (!(l > 0.0) || l > (hi - lo) / 2.0)
        throw WindowTooLarge("window length " + fmt_double(l) + " exceeds half the unfolded span " +
                             fmt_double((hi - lo) / 2.0));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> center(lo + l / 2.0, hi - l / 2.0);
    const double* begin = xi.xi.data();
    const double* end = begin + xi.n();
    double sum = 0.0, sum2 = 0.0;
    for (int w = 0; w < n_windows; ++w) {
        const double c = center(rng);
        const double count = static_cast<double>(
            std::upper_bound(begin, end, c + l / 2.0) - std::lower_bound(begin, end, c - l / 2.0));
        sum += count;
        sum2 += count * count;
    }
    const double mean = sum / n_windows;
    return (sum2 - n_windows * mean * mean) / (n_windows - 1);
}

// Two-level cluster function of the orthogonal ensemble:
// Y(x) = s(x)^2 + s'(x) * (1/2 - Si(πx)/π), s(x) = sin(πx)/(πx).
inline double goe_cluster_function(double x) {
    const double s = sine_kernel(x);
    const double tail = 0.5 - sine_integral(M_PI * x) / M_PI;  // ∫_x^∞ s
    return s * s + sine_kernel_derivative(x) * tail;
}

// Theoretical number variance Σ²(l) = l - 2 ∫₀ˡ (l-x) Y(x) dx.
inline double number_variance_goe(double l) {
    if (l < 0.0) throw ConfigError("window length must be nonnegative");
    if (l == 0.0) return 0.0;
    const double integral =
        integrate([l](double x) { return (l - x) * goe_cluster_function(x); }, 0.0, l, 1e-10);
    return l - 2.0 * integral;
}

struct VarianceCurve {
    std::vector<double> l;
    std::vector<double> sigma2;
    std::string source;  // "empirical" | "goe-theory" | "poisson-theory"
};

// Sup distance between the sample's empirical CDF and the target density's
// CDF (accumulated by quadrature between consecutive sample points).
inline double ks_distance(const SpacingSample& sample, const std::function<double(double)>& pdf) {
    if (sample.values.empty()) throw EmptySample("KS distance of an empty sample");
    std::vector<double> sorted = sample.values;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double cdf = 0.0;
    double prev = 0.0;
    double dist = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        cdf += integrate(pdf, prev, sorted[i], 1e-11);
        prev = sorted[i];
        dist = std::max(dist, std::max(cdf - static_cast<double>(i) / n,
                                       static_cast<double>(i + 1) / n - cdf));
    }
    return dist;
}

// Two-sample sup-norm CDF distance.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw EmptySample("two-sample KS with an empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double dist = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        dist = std::max(dist, std::abs(static_cast<double>(i) / a.size() -
                                       static_cast<double>(j) / b.size()));
    }
    return dist;
}

}  // namespace rmt
