#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rmt/correlation.hpp"
#include "rmt/errors.hpp"

namespace rmt {

// Marchenko–Pastur spectrum edges for aspect ratio Q = L/N > 1.
struct MpLaw {
    double q = 0.0;
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
};

inline MpLaw mp_bounds(double q) {
    if (!(q > 1.0)) throw QOutOfRange("Q = " + fmt_double(q) + " but MP bounds require Q > 1");
    MpLaw law;
    law.q = q;
    const double root = 2.0 * std::sqrt(1.0 / q);
    law.lambda_minus = 1.0 + 1.0 / q - root;
    law.lambda_plus = 1.0 + 1.0 / q + root;
    return law;
}

inline double mp_density(double lambda, const MpLaw& law) {
    if (lambda <= law.lambda_minus || lambda >= law.lambda_plus) return 0.0;
    return law.q / (2.0 * M_PI) *
           std::sqrt((law.lambda_plus - lambda) * (lambda - law.lambda_minus)) / lambda;
}

// Full eigensystem of a correlation matrix plus its MP classification.
struct SpectralResult {
    std::vector<std::string> labels;
    Vector eigenvalues;   // ascending
    Matrix eigenvectors;  // column k pairs with eigenvalue k, sign-fixed
    MpLaw mp;
    std::vector<int> bulk_indices;
    std::vector<int> deviating_above;  // λ > λ₊, ascending index order
    std::vector<int> deviating_below;  // λ < λ₋

    int n() const { return static_cast<int>(eigenvalues.size()); }
    int p() const { return static_cast<int>(deviating_above.size()); }
};

struct Classification {
    std::vector<int> bulk, deviating_above, deviating_below;
    int p() const { return static_cast<int>(deviating_above.size()); }
};

// Strict inequalities: an eigenvalue exactly on an edge counts as bulk.
inline Classification classify(const Vector& eigenvalues, const MpLaw& mp) {
    Classification c;
    for (int i = 0; i < eigenvalues.size(); ++i) {
        if (eigenvalues(i) > mp.lambda_plus)
            c.deviating_above.push_back(i);
        else if (eigenvalues(i) < mp.lambda_minus)
            c.deviating_below.push_back(i);
        else
            c.bulk.push_back(i);
    }
    return c;
}

inline Classification classify(const SpectralResult& spec) {
    return classify(spec.eigenvalues, spec.mp);
}

namespace detail {

// Index of the largest-|entry| component; ties go to the lowest index.
inline int peak_index(const Vector& u) {
    int best = 0;
    double best_abs = std::abs(u(0));
    for (int i = 1; i < u.size(); ++i) {
        const double a = std::abs(u(i));
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    return best;
}

}  // namespace detail

// Make the largest-|entry| component positive.
inline void fix_sign(Eigen::Ref<Vector> u) {
    if (u(detail::peak_index(u)) < 0.0) u = -u;
}

inline SpectralResult eigendecompose(const CorrelationMatrix& c) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(c.values);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("eigensolver failed on " + std::to_string(c.n()) + "x" +
                                 std::to_string(c.n()) + " matrix with |C|_max = " +
                                 fmt_double(c.values.cwiseAbs().maxCoeff()));
    }
    SpectralResult spec;
    spec.labels = c.labels;
    spec.eigenvalues = solver.eigenvalues();  // ascending
    spec.eigenvectors = solver.eigenvectors();
    const int n = spec.n();
    for (int k = 0; k < n; ++k) fix_sign(spec.eigenvectors.col(k));

    // Within a degenerate cluster the solver's column order is arbitrary;
    // order such columns by the index of their peak component.
    int start = 0;
    while (start < n) {
        int end = start + 1;
        while (end < n && spec.eigenvalues(end) - spec.eigenvalues(end - 1) < 1e-12) ++end;
        if (end - start > 1) {
            std::vector<int> order(static_cast<std::size_t>(end - start));
            std::iota(order.begin(), order.end(), start);
            std::vector<int> peaks(static_cast<std::size_t>(n));
            for (int k = start; k < end; ++k)
                peaks[static_cast<std::size_t>(k)] = detail::peak_index(spec.eigenvectors.col(k));
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return peaks[static_cast<std::size_t>(a)] < peaks[static_cast<std::size_t>(b)];
            });
            Matrix cols = spec.eigenvectors.middleCols(start, end - start);
            Vector vals = spec.eigenvalues.segment(start, end - start);
            for (int k = 0; k < end - start; ++k) {
                spec.eigenvectors.col(start + k) = cols.col(order[static_cast<std::size_t>(k)] - start);
                spec.eigenvalues(start + k) = vals(order[static_cast<std::size_t>(k)] - start);
            }
        }
        start = end;
    }

    spec.mp = mp_bounds(c.q());
    Classification cls = classify(spec.eigenvalues, spec.mp);
    spec.bulk_indices = std::move(cls.bulk);
    spec.deviating_above = std::move(cls.deviating_above);
    spec.deviating_below = std::move(cls.deviating_below);
    return spec;
}

}  // namespace rmt
