#pragma once

#include <string>
#include <vector>

#include "rmt/correlation.hpp"
#include "rmt/errors.hpp"
#include "rmt/panel.hpp"
#include "rmt/spectrum.hpp"

namespace rmt {

struct Span {
    int start = 0;
    int end = 0;  // half-open [start, end)

    int length() const { return end - start; }
    bool operator==(const Span& o) const { return start == o.start && end == o.end; }
    std::string str() const { return "[" + std::to_string(start) + ", " + std::to_string(end) + ")"; }
};

struct WindowPlan {
    int window = 0;
    int step = 0;
    std::vector<Span> spans;
};

// Maximal list of aligned windows of the given length over L observations.
inline WindowPlan plan_windows(int l, int window, int step) {
    if (window < 1) throw ConfigError("window length must be positive");
    if (step < 1) throw ConfigError("window step must be positive");
    if (window > l)
        throw WindowTooLong("window " + std::to_string(window) + " exceeds panel length " +
                            std::to_string(l));
    WindowPlan plan;
    plan.window = window;
    plan.step = step;
    for (int start = 0; start + window <= l; start += step) plan.spans.push_back({start, start + window});
    return plan;
}

// Deviating-above eigenvectors as rows, strongest eigenvalue first.
struct DeviatingBasis {
    Matrix d;           // p x N
    Vector eigenvalues; // descending, length p
    Span span;

    int p() const { return static_cast<int>(d.rows()); }
    int n() const { return static_cast<int>(d.cols()); }
};

inline DeviatingBasis deviating_basis(const SpectralResult& spec, Span span = {}) {
    if (spec.deviating_above.empty())
        throw NoDeviating("no eigenvalues above the upper MP bound in window " + span.str());
    DeviatingBasis basis;
    basis.span = span;
    const int p = spec.p();
    basis.d.resize(p, spec.n());
    basis.eigenvalues.resize(p);
    for (int r = 0; r < p; ++r) {
        // deviating_above is ascending; row 0 takes the largest eigenvalue
        const int k = spec.deviating_above[static_cast<std::size_t>(p - 1 - r)];
        basis.d.row(r) = spec.eigenvectors.col(k).transpose();
        basis.eigenvalues(r) = spec.eigenvalues(k);
    }
    return basis;
}

struct OverlapMatrix {
    Matrix o;  // p_A x p_B
    Span span_a, span_b;
    long lag = 0;
};

// O = D_A D_B^T: entrywise scalar products of the two deviating bases.
// Entries are summed per pair so overlap(A,B)^T == overlap(B,A) exactly.
inline OverlapMatrix overlap(const DeviatingBasis& a, const DeviatingBasis& b) {
    if (a.n() != b.n())
        throw DimensionMismatch("bases live in different dimensions: " + std::to_string(a.n()) +
                                " vs " + std::to_string(b.n()));
    OverlapMatrix out;
    out.o.resize(a.p(), b.p());
    for (int i = 0; i < a.p(); ++i)
        for (int j = 0; j < b.p(); ++j) out.o(i, j) = a.d.row(i).dot(b.d.row(j));
    out.span_a = a.span;
    out.span_b = b.span;
    out.lag = b.span.start - a.span.start;
    return out;
}

// Spectrum of one column window of a normalized panel.
inline SpectralResult window_spectrum(const NormalizedPanel& panel, Span span) {
    return eigendecompose(correlation_matrix(slice_window(panel, span.start, span.end)));
}

struct LagSummary {
    long lag = 0;
    Span window;
    bool ok = false;
    std::string error;                 // set when !ok (window had no deviating vectors)
    Matrix o;                          // overlap of base vs lagged basis
    std::vector<double> diagonal;      // signed, min(p_A, p_B) entries
    std::vector<double> abs_diagonal;
    double mean_abs_diagonal = 0.0;
};

struct StabilityReport {
    Span base;
    int base_p = 0;
    std::vector<LagSummary> lags;
    int most_stable_row = -1;  // argmax of mean |O_ii| across usable lags
};

// Overlap of the deviating basis at the base window against the same-length
// window at each lag; lag-window failures are recorded, not fatal.
inline StabilityReport stability_report(const NormalizedPanel& panel, Span base,
                                        const std::vector<long>& lags) {
    const int w = base.length();
    if (w < 2) throw ConfigError("base window too short");
    for (long lag : lags) {
        if (lag < 0 || base.start + lag + w > panel.l())
            throw WindowTooLong("lag " + std::to_string(lag) + " puts window past " +
                                std::to_string(panel.l()) + " observations");
    }
    StabilityReport report;
    report.base = base;
    const DeviatingBasis base_basis = deviating_basis(window_spectrum(panel, base), base);
    report.base_p = base_basis.p();

    for (long lag : lags) {
        LagSummary entry;
        entry.lag = lag;
        entry.window = {base.start + static_cast<int>(lag), base.start + static_cast<int>(lag) + w};
        try {
            const DeviatingBasis lagged =
                deviating_basis(window_spectrum(panel, entry.window), entry.window);
            const OverlapMatrix o = overlap(base_basis, lagged);
            entry.o = o.o;
            const int diag = std::min(base_basis.p(), lagged.p());
            for (int i = 0; i < diag; ++i) {
                entry.diagonal.push_back(o.o(i, i));
                entry.abs_diagonal.push_back(std::abs(o.o(i, i)));
                entry.mean_abs_diagonal += std::abs(o.o(i, i));
            }
            entry.mean_abs_diagonal /= diag;
            entry.ok = true;
        } catch (const NoDeviating& e) {
            entry.error = e.what();
        }
        report.lags.push_back(std::move(entry));
    }

    // Row with the highest mean |O_ii| over the lags where it exists.
    double best = -1.0;
    for (int row = 0; row < report.base_p; ++row) {
        double sum = 0.0;
        int used = 0;
        for (const auto& entry : report.lags) {
            if (!entry.ok || row >= static_cast<int>(entry.abs_diagonal.size())) continue;
            sum += entry.abs_diagonal[static_cast<std::size_t>(row)];
            ++used;
        }
        if (used == 0) continue;
        const double mean = sum / used;
        if (mean > best) {
            best = mean;
            report.most_stable_row = row;
        }
    }
    return report;
}

}  // namespace rmt
