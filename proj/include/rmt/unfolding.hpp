#pragma once

#include <algorithm>

#include "rmt/errors.hpp"
#include "rmt/numeric.hpp"

namespace rmt {

// Smooth counting function: a sum of normal CDFs, one per eigenvalue, each
// broadened to a * (local mean spacing over the 2a+1 eigenvalues centered on
// it, truncated at the spectrum ends).
class BroadenedCdf {
  public:
    BroadenedCdf(Vector eigenvalues, int a) : lambda_(std::move(eigenvalues)) {
        const int n = static_cast<int>(lambda_.size());
        if (a < 1) throw ConfigError("broadening parameter a must be >= 1");
        if (n < 2 * a + 1)
            throw TooFewEigenvalues("broadening a = " + std::to_string(a) + " needs at least " +
                                    std::to_string(2 * a + 1) + " eigenvalues, got " +
                                    std::to_string(n));
        if (!std::is_sorted(lambda_.data(), lambda_.data() + n))
            throw ConfigError("eigenvalues must be sorted ascending");
        const double floor = 1e-12 * (lambda_(n - 1) - lambda_(0) + 1.0);
        sigma_.resize(n);
        for (int k = 0; k < n; ++k) {
            const int lo = std::max(0, k - a);
            const int hi = std::min(n - 1, k + a);
            const double spacing = (lambda_(hi) - lambda_(lo)) / (hi - lo);
            sigma_(k) = std::max(a * spacing, floor);
        }
    }

    double operator()(double lambda) const {
        double sum = 0.0;
        for (int k = 0; k < lambda_.size(); ++k)
            sum += normal_cdf((lambda - lambda_(k)) / sigma_(k));
        return sum;
    }

    const Vector& eigenvalues() const { return lambda_; }
    const Vector& widths() const { return sigma_; }

  private:
    Vector lambda_;
    Vector sigma_;
};

inline double broadened_cdf(const Vector& eigenvalues, int a, double lambda) {
    return BroadenedCdf(eigenvalues, a)(lambda);
}

// Plain staircase count #{i : λ_i <= λ}.
inline int empirical_cdf(const Vector& eigenvalues, double lambda) {
    const double* begin = eigenvalues.data();
    const double* end = begin + eigenvalues.size();
    return static_cast<int>(std::upper_bound(begin, end, lambda) - begin);
}

// Eigenvalues mapped through the smooth counting function: ξ_i = F_av(λ_i),
// giving a spectrum with uniform mean density ~1.
struct UnfoldedSpectrum {
    Vector xi;      // nondecreasing, in [0, N]
    Vector source;  // eigenvalues that produced xi
    int a = 0;

    int n() const { return static_cast<int>(xi.size()); }
};

inline UnfoldedSpectrum unfold(const Vector& eigenvalues, int a) {
    BroadenedCdf cdf(eigenvalues, a);
    UnfoldedSpectrum out;
    out.a = a;
    out.source = cdf.eigenvalues();
    out.xi.resize(out.source.size());
    for (int i = 0; i < out.source.size(); ++i) out.xi(i) = cdf(out.source(i));
    return out;
}

}  // namespace rmt
