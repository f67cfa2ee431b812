#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rmt/correlation.hpp"
#include "rmt/eigenmodes.hpp"
#include "rmt/errors.hpp"
#include "rmt/panel.hpp"
#include "rmt/report.hpp"
#include "rmt/rmtstats.hpp"
#include "rmt/spectrum.hpp"
#include "rmt/stability.hpp"
#include "rmt/unfolding.hpp"

namespace rmt {

struct AnalyzeOptions {
    int broadening_a = 8;
    bool bulk_only = false;       // unfold only the in-bounds eigenvalues
    int window = 0;               // 0: one window spanning everything
    int step = 0;                 // 0: window length (non-overlapping)
    int min_distinct = 2;
    std::uint64_t seed = 1;       // number-variance sampling
    double ipr_tail_mult = 2.5;   // tail threshold = mult * 3/N
    bool with_universality = true;
    int variance_windows = 2000;
    double variance_l_max = 10.0;
};

// Everything cmd_analyze needs: the machine-readable report plus the
// intermediate objects the plot CSVs are derived from.
struct AnalyzeResult {
    AnalyzeReport report;
    TrafficPanel panel;  // post-exclusion
    ReturnsPanel returns;
    NormalizedPanel normalized;
    SpectralResult spectrum;
    bool unfolded_available = false;
    UnfoldedSpectrum unfolded;
    SpacingSample nn, nnn;
    std::vector<double> var_l, var_empirical, var_goe;
    bool projection_available = false;
    ProjectionSeries projection;
    RegressionResult regression;
};

namespace detail {

// Length of the localized tail of the IPR-versus-eigenvalue curve: vectors
// beyond the upper bulk edge whose IPR clears the threshold. Localized
// vectors inside the bulk (band-edge states, isolated pairs) do not count.
inline int ipr_tail_count(const SpectralResult& spec, double threshold) {
    int count = 0;
    for (int k : spec.deviating_above)
        if (ipr(spec.eigenvectors.col(k)) > threshold) ++count;
    return count;
}

}  // namespace detail

inline AnalyzeResult analyze_panel(const TrafficPanel& raw, const AnalyzeOptions& opt) {
    AnalyzeResult out;
    auto [panel, excluded] = exclude_inactive(raw, opt.min_distinct);
    out.panel = std::move(panel);
    out.returns = log_returns(out.panel);
    out.normalized = normalize(out.returns);
    const int n = out.normalized.n();
    const int l = out.normalized.l();

    AnalyzeReport& report = out.report;
    report.n = n;
    report.l = l;
    report.q = out.normalized.q();
    report.seed = opt.seed;
    report.broadening_a = opt.broadening_a;
    report.bulk_only = opt.bulk_only;
    report.ipr_tail_threshold = opt.ipr_tail_mult * 3.0 / n;
    report.labels = out.normalized.labels;
    report.excluded = std::move(excluded);

    out.spectrum = eigendecompose(correlation_matrix(out.normalized));
    report.eigenvalues.assign(out.spectrum.eigenvalues.begin(), out.spectrum.eigenvalues.end());
    report.mp = out.spectrum.mp;
    report.deviating_above = out.spectrum.deviating_above;
    report.deviating_below = out.spectrum.deviating_below;
    for (int k = 0; k < n; ++k) report.ipr_series.push_back(ipr(out.spectrum.eigenvectors.col(k)));

    for (int k : out.spectrum.deviating_above) {
        DeviatingVectorReport d;
        d.index = k;
        d.eigenvalue = out.spectrum.eigenvalues(k);
        d.ipr = report.ipr_series[static_cast<std::size_t>(k)];
        d.participants = significant_participants(out.spectrum.eigenvectors.col(k), report.labels);
        const ComponentStats stats = component_stats(out.spectrum.eigenvectors.col(k), k);
        d.kurtosis = stats.kurtosis;
        d.positive_fraction = stats.positive_fraction;
        report.deviating_vectors.push_back(std::move(d));
    }

    // Windowed monitoring pass; a single full-span window when none is asked.
    const int window = opt.window > 0 ? opt.window : l;
    const int step = opt.step > 0 ? opt.step : window;
    const WindowPlan plan = plan_windows(l, window, step);
    for (const Span& span : plan.spans) {
        const SpectralResult spec =
            span.length() == l ? out.spectrum : window_spectrum(out.normalized, span);
        WindowStats stats;
        stats.span = span;
        stats.top_eigenvalue = spec.eigenvalues(spec.n() - 1);
        stats.p = spec.p();
        stats.ipr_tail_count = detail::ipr_tail_count(spec, report.ipr_tail_threshold);
        report.windows.push_back(stats);
        if (&span == &plan.spans.back() && spec.p() > 0) {
            const DeviatingBasis basis = deviating_basis(spec, span);
            report.basis.span = span;
            report.basis.eigenvalues.assign(basis.eigenvalues.begin(), basis.eigenvalues.end());
            for (int r = 0; r < basis.p(); ++r)
                report.basis.vectors.emplace_back(basis.d.row(r).begin(), basis.d.row(r).end());
        }
    }

    if (opt.with_universality && n >= 2 * opt.broadening_a + 1) {
        Vector eigs;
        if (opt.bulk_only) {
            eigs.resize(static_cast<Eigen::Index>(out.spectrum.bulk_indices.size()));
            for (std::size_t i = 0; i < out.spectrum.bulk_indices.size(); ++i)
                eigs(static_cast<Eigen::Index>(i)) =
                    out.spectrum.eigenvalues(out.spectrum.bulk_indices[i]);
        } else {
            eigs = out.spectrum.eigenvalues;
        }
        if (eigs.size() >= 2 * opt.broadening_a + 1) {
            out.unfolded = unfold(eigs, opt.broadening_a);
            out.unfolded_available = true;
            out.nn = nn_spacings(out.unfolded);
            out.nnn = nnn_spacings(out.unfolded);
            const double half_span =
                (out.unfolded.xi(out.unfolded.n() - 1) - out.unfolded.xi(0)) / 2.0;
            for (double lw = 0.5; lw <= std::min(opt.variance_l_max, half_span) + 1e-12; lw += 0.5) {
                out.var_l.push_back(lw);
                out.var_empirical.push_back(
                    number_variance_empirical(out.unfolded, lw, opt.variance_windows, opt.seed));
                out.var_goe.push_back(number_variance_goe(lw));
            }
        }
    }

    if (out.spectrum.p() > 0) {
        const int top = out.spectrum.deviating_above.back();
        out.projection = project(out.returns, out.spectrum.eigenvectors.col(top), top);
        out.regression = regress_projection(out.projection, out.returns);
        out.projection_available = true;
    }
    return out;
}

}  // namespace rmt
