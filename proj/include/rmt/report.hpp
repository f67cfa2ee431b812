#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmt/eigenmodes.hpp"
#include "rmt/errors.hpp"
#include "rmt/panel.hpp"
#include "rmt/rmtstats.hpp"
#include "rmt/spectrum.hpp"
#include "rmt/stability.hpp"
#include "rmt/synth.hpp"
#include "rmt/unfolding.hpp"

namespace rmt {

using nlohmann::json;

// ---------------------------------------------------------------------------
// analyze report

struct WindowStats {
    Span span;
    double top_eigenvalue = 0.0;
    int p = 0;                // eigenvalues above the upper MP bound
    int ipr_tail_count = 0;   // deviating (λ > λ₊) eigenvectors with IPR above the tail threshold

    bool operator==(const WindowStats&) const = default;
};

struct DeviatingVectorReport {
    int index = -1;  // position in the ascending eigenvalue order
    double eigenvalue = 0.0;
    double ipr = 0.0;
    std::vector<std::string> participants;  // strongest component first
    double kurtosis = 0.0;
    double positive_fraction = 0.0;

    bool operator==(const DeviatingVectorReport&) const = default;
};

// Deviating basis of one window, rows ordered by descending eigenvalue.
struct BasisSection {
    Span span;
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> vectors;

    int p() const { return static_cast<int>(vectors.size()); }
    bool operator==(const BasisSection&) const = default;
};

struct AnalyzeReport {
    int n = 0;  // series count after exclusion
    int l = 0;  // return observations
    double q = 0.0;
    std::uint64_t seed = 0;
    int broadening_a = 8;
    bool bulk_only = false;
    double ipr_tail_threshold = 0.0;
    std::vector<std::string> labels;
    std::vector<ExclusionEntry> excluded;
    std::vector<double> eigenvalues;  // ascending
    MpLaw mp;
    std::vector<int> deviating_above;
    std::vector<int> deviating_below;
    std::vector<double> ipr_series;  // per eigenvector, ascending eigenvalue order
    std::vector<DeviatingVectorReport> deviating_vectors;
    std::vector<WindowStats> windows;
    BasisSection basis;  // deviating basis of the last window; empty when p = 0

    int p() const { return static_cast<int>(deviating_above.size()); }
};

inline bool operator==(const ExclusionEntry& a, const ExclusionEntry& b) {
    return a.label == b.label && a.distinct_values == b.distinct_values && a.reason == b.reason;
}

inline bool operator==(const MpLaw& a, const MpLaw& b) {
    return a.q == b.q && a.lambda_minus == b.lambda_minus && a.lambda_plus == b.lambda_plus;
}

inline bool operator==(const AnalyzeReport& a, const AnalyzeReport& b) {
    return a.n == b.n && a.l == b.l && a.q == b.q && a.seed == b.seed &&
           a.broadening_a == b.broadening_a && a.bulk_only == b.bulk_only &&
           a.ipr_tail_threshold == b.ipr_tail_threshold && a.labels == b.labels &&
           a.excluded == b.excluded && a.eigenvalues == b.eigenvalues && a.mp == b.mp &&
           a.deviating_above == b.deviating_above && a.deviating_below == b.deviating_below &&
           a.ipr_series == b.ipr_series && a.deviating_vectors == b.deviating_vectors &&
           a.windows == b.windows && a.basis == b.basis;
}

inline void to_json(json& j, const Span& s) { j = json{{"start", s.start}, {"end", s.end}}; }
inline void from_json(const json& j, Span& s) {
    j.at("start").get_to(s.start);
    j.at("end").get_to(s.end);
}

inline void to_json(json& j, const MpLaw& m) {
    j = json{{"q", m.q}, {"lambda_minus", m.lambda_minus}, {"lambda_plus", m.lambda_plus}};
}
inline void from_json(const json& j, MpLaw& m) {
    j.at("q").get_to(m.q);
    j.at("lambda_minus").get_to(m.lambda_minus);
    j.at("lambda_plus").get_to(m.lambda_plus);
}

inline void to_json(json& j, const ExclusionEntry& e) {
    j = json{{"label", e.label}, {"distinct_values", e.distinct_values}, {"reason", e.reason}};
}
inline void from_json(const json& j, ExclusionEntry& e) {
    j.at("label").get_to(e.label);
    j.at("distinct_values").get_to(e.distinct_values);
    j.at("reason").get_to(e.reason);
}

inline void to_json(json& j, const WindowStats& w) {
    j = json{{"start", w.span.start},
             {"end", w.span.end},
             {"top_eigenvalue", w.top_eigenvalue},
             {"p", w.p},
             {"ipr_tail_count", w.ipr_tail_count}};
}
inline void from_json(const json& j, WindowStats& w) {
    j.at("start").get_to(w.span.start);
    j.at("end").get_to(w.span.end);
    j.at("top_eigenvalue").get_to(w.top_eigenvalue);
    j.at("p").get_to(w.p);
    j.at("ipr_tail_count").get_to(w.ipr_tail_count);
}

inline void to_json(json& j, const DeviatingVectorReport& d) {
    j = json{{"index", d.index},
             {"eigenvalue", d.eigenvalue},
             {"ipr", d.ipr},
             {"participant_count", d.participants.size()},
             {"participants", d.participants},
             {"kurtosis", d.kurtosis},
             {"positive_fraction", d.positive_fraction}};
}
inline void from_json(const json& j, DeviatingVectorReport& d) {
    j.at("index").get_to(d.index);
    j.at("eigenvalue").get_to(d.eigenvalue);
    j.at("ipr").get_to(d.ipr);
    j.at("participants").get_to(d.participants);
    j.at("kurtosis").get_to(d.kurtosis);
    j.at("positive_fraction").get_to(d.positive_fraction);
}

inline void to_json(json& j, const BasisSection& b) {
    j = json{{"start", b.span.start},
             {"end", b.span.end},
             {"eigenvalues", b.eigenvalues},
             {"vectors", b.vectors}};
}
inline void from_json(const json& j, BasisSection& b) {
    j.at("start").get_to(b.span.start);
    j.at("end").get_to(b.span.end);
    j.at("eigenvalues").get_to(b.eigenvalues);
    j.at("vectors").get_to(b.vectors);
}

inline void to_json(json& j, const AnalyzeReport& r) {
    j = json{{"kind", "analyze"},
             {"n", r.n},
             {"l", r.l},
             {"q", r.q},
             {"seed", r.seed},
             {"broadening_a", r.broadening_a},
             {"bulk_only", r.bulk_only},
             {"ipr_tail_threshold", r.ipr_tail_threshold},
             {"labels", r.labels},
             {"excluded", r.excluded},
             {"spectrum",
              json{{"eigenvalues", r.eigenvalues},
                   {"mp", r.mp},
                   {"deviating_above", r.deviating_above},
                   {"deviating_below", r.deviating_below},
                   {"p", r.p()}}},
             {"ipr", r.ipr_series},
             {"deviating_vectors", r.deviating_vectors},
             {"windows", r.windows},
             {"basis", r.basis}};
}
inline void from_json(const json& j, AnalyzeReport& r) {
    if (j.value("kind", "") != std::string("analyze"))
        throw IncompatibleReports("not an analysis report");
    j.at("n").get_to(r.n);
    j.at("l").get_to(r.l);
    j.at("q").get_to(r.q);
    j.at("seed").get_to(r.seed);
    j.at("broadening_a").get_to(r.broadening_a);
    j.at("bulk_only").get_to(r.bulk_only);
    j.at("ipr_tail_threshold").get_to(r.ipr_tail_threshold);
    j.at("labels").get_to(r.labels);
    j.at("excluded").get_to(r.excluded);
    const json& spectrum = j.at("spectrum");
    spectrum.at("eigenvalues").get_to(r.eigenvalues);
    spectrum.at("mp").get_to(r.mp);
    spectrum.at("deviating_above").get_to(r.deviating_above);
    spectrum.at("deviating_below").get_to(r.deviating_below);
    j.at("ipr").get_to(r.ipr_series);
    j.at("deviating_vectors").get_to(r.deviating_vectors);
    j.at("windows").get_to(r.windows);
    j.at("basis").get_to(r.basis);
}

// ---------------------------------------------------------------------------
// stability report

inline void to_json(json& j, const LagSummary& s) {
    std::vector<std::vector<double>> o(static_cast<std::size_t>(s.o.rows()));
    for (int r = 0; r < s.o.rows(); ++r)
        o[static_cast<std::size_t>(r)].assign(s.o.row(r).begin(), s.o.row(r).end());
    j = json{{"lag", s.lag},
             {"start", s.window.start},
             {"end", s.window.end},
             {"ok", s.ok},
             {"error", s.error},
             {"mean_abs_diagonal", s.mean_abs_diagonal},
             {"diagonal", s.diagonal},
             {"abs_diagonal", s.abs_diagonal},
             {"overlap", o}};
}
inline void from_json(const json& j, LagSummary& s) {
    j.at("lag").get_to(s.lag);
    j.at("start").get_to(s.window.start);
    j.at("end").get_to(s.window.end);
    j.at("ok").get_to(s.ok);
    j.at("error").get_to(s.error);
    j.at("mean_abs_diagonal").get_to(s.mean_abs_diagonal);
    j.at("diagonal").get_to(s.diagonal);
    j.at("abs_diagonal").get_to(s.abs_diagonal);
    std::vector<std::vector<double>> o;
    j.at("overlap").get_to(o);
    s.o.resize(static_cast<Eigen::Index>(o.size()),
               o.empty() ? 0 : static_cast<Eigen::Index>(o[0].size()));
    for (std::size_t r = 0; r < o.size(); ++r)
        for (std::size_t c = 0; c < o[r].size(); ++c)
            s.o(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = o[r][c];
}

inline void to_json(json& j, const StabilityReport& r) {
    j = json{{"kind", "stability"},
             {"base", r.base},
             {"base_p", r.base_p},
             {"most_stable_row", r.most_stable_row},
             {"lags", r.lags}};
}
inline void from_json(const json& j, StabilityReport& r) {
    if (j.value("kind", "") != std::string("stability"))
        throw IncompatibleReports("not a stability report");
    j.at("base").get_to(r.base);
    j.at("base_p").get_to(r.base_p);
    j.at("most_stable_row").get_to(r.most_stable_row);
    j.at("lags").get_to(r.lags);
}

inline bool operator==(const LagSummary& a, const LagSummary& b) {
    return a.lag == b.lag && a.window == b.window && a.ok == b.ok && a.error == b.error &&
           a.mean_abs_diagonal == b.mean_abs_diagonal && a.diagonal == b.diagonal &&
           a.abs_diagonal == b.abs_diagonal && a.o.rows() == b.o.rows() &&
           a.o.cols() == b.o.cols() && a.o == b.o;
}

inline bool operator==(const StabilityReport& a, const StabilityReport& b) {
    return a.base == b.base && a.base_p == b.base_p && a.most_stable_row == b.most_stable_row &&
           a.lags == b.lags;
}

// ---------------------------------------------------------------------------
// injection specs

inline void to_json(json& j, const InjectionSpec& s) {
    j = json{{"kind", injection_kind_name(s.kind)},
             {"targets", s.targets},
             {"span", json::array({s.start, s.end})},
             {"rho", s.rho},
             {"seed", s.seed}};
}
inline void from_json(const json& j, InjectionSpec& s) {
    s.kind = injection_kind_from_name(j.at("kind").get<std::string>());
    j.at("targets").get_to(s.targets);
    const json& span = j.at("span");
    if (!span.is_array() || span.size() != 2)
        throw ConfigError("injection span must be [start, end]");
    s.start = span[0].get<int>();
    s.end = span[1].get<int>();
    s.rho = j.value("rho", 0.0);
    s.seed = j.value("seed", std::uint64_t{0});
}

inline std::vector<InjectionSpec> parse_injection_specs(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("injection spec is not valid JSON: ") + e.what());
    }
    if (!j.is_array()) throw ConfigError("injection spec file must hold a JSON list");
    std::vector<InjectionSpec> specs;
    for (const auto& item : j) specs.push_back(item.get<InjectionSpec>());
    return specs;
}

// ---------------------------------------------------------------------------
// CSV emitters (plot data)

inline void write_matrix_csv(const Matrix& m, std::ostream& out) {
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << fmt_double(m(r, c));
        }
        out << '\n';
    }
}

inline void write_mask_csv(const Eigen::MatrixXi& m, std::ostream& out) {
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << m(r, c);
        }
        out << '\n';
    }
}

struct Histogram {
    double lo = 0.0, hi = 0.0;
    std::vector<double> center;
    std::vector<double> density;  // count / (total * bin width)
};

inline Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins) {
    if (bins < 1 || !(hi > lo)) throw ConfigError("bad histogram layout");
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    const double width = (hi - lo) / bins;
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        const int b = static_cast<int>(std::floor((v - lo) / width));
        if (b >= 0 && b < bins) ++counts[static_cast<std::size_t>(b)];
    }
    for (int b = 0; b < bins; ++b) {
        h.center.push_back(lo + (b + 0.5) * width);
        h.density.push_back(values.empty() ? 0.0
                                           : counts[static_cast<std::size_t>(b)] /
                                                 (static_cast<double>(values.size()) * width));
    }
    return h;
}

// bin_center, empirical_density, mp_density
inline void write_eigenvalue_density_csv(const std::vector<double>& eigenvalues, const MpLaw& mp,
                                         std::ostream& out, int bins = 60) {
    double lo = mp.lambda_minus, hi = mp.lambda_plus;
    for (double v : eigenvalues) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const Histogram h = make_histogram(eigenvalues, lo, hi + 1e-9, bins);
    out << "bin_center,empirical_density,mp_density\n";
    for (std::size_t b = 0; b < h.center.size(); ++b)
        out << fmt_double(h.center[b]) << ',' << fmt_double(h.density[b]) << ','
            << fmt_double(mp_density(h.center[b], mp)) << '\n';
}

// lambda, xi
inline void write_unfolded_csv(const UnfoldedSpectrum& u, std::ostream& out) {
    out << "lambda,xi\n";
    for (int i = 0; i < u.n(); ++i)
        out << fmt_double(u.source(i)) << ',' << fmt_double(u.xi(i)) << '\n';
}

// bin_center, empirical_density, theory_density
inline void write_spacing_csv(const SpacingSample& sample,
                              const std::function<double(double)>& theory_pdf, std::ostream& out,
                              int bins = 40, double hi = 4.0) {
    const Histogram h = make_histogram(sample.values, 0.0, hi, bins);
    out << "bin_center,empirical_density,theory_density\n";
    for (std::size_t b = 0; b < h.center.size(); ++b)
        out << fmt_double(h.center[b]) << ',' << fmt_double(h.density[b]) << ','
            << fmt_double(theory_pdf(h.center[b])) << '\n';
}

// l, empirical, goe, poisson
inline void write_variance_csv(const std::vector<double>& l, const std::vector<double>& empirical,
                               const std::vector<double>& goe, std::ostream& out) {
    out << "l,empirical,goe,poisson\n";
    for (std::size_t i = 0; i < l.size(); ++i)
        out << fmt_double(l[i]) << ',' << fmt_double(empirical[i]) << ',' << fmt_double(goe[i])
            << ',' << fmt_double(l[i]) << '\n';
}

// eigenvalue, ipr
inline void write_ipr_csv(const std::vector<double>& eigenvalues, const std::vector<double>& ipr,
                          std::ostream& out) {
    out << "eigenvalue,ipr\n";
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
        out << fmt_double(eigenvalues[i]) << ',' << fmt_double(ipr[i]) << '\n';
}

// bin_center, empirical_density, gaussian_density
inline void write_components_csv(const ComponentStats& stats, int n, std::ostream& out) {
    const int bins = static_cast<int>(stats.histogram.size());
    const double width = (stats.histogram_hi - stats.histogram_lo) / bins;
    out << "bin_center,empirical_density,gaussian_density\n";
    for (int b = 0; b < bins; ++b) {
        const double center = stats.histogram_lo + (b + 0.5) * width;
        const double density = stats.histogram[static_cast<std::size_t>(b)] / (n * width);
        out << fmt_double(center) << ',' << fmt_double(density) << ','
            << fmt_double(std::exp(-center * center / 2.0) / std::sqrt(2.0 * M_PI)) << '\n';
    }
}

// label, correlation
inline void write_projection_corr_csv(const std::vector<std::string>& labels,
                                      const std::vector<double>& corr, std::ostream& out) {
    out << "label,correlation\n";
    for (std::size_t i = 0; i < labels.size(); ++i)
        out << labels[i] << ',' << fmt_double(corr[i]) << '\n';
}

// t, projection, best_series
inline void write_projection_scatter_csv(const ProjectionSeries& proj,
                                         const Eigen::RowVectorXd& best_series,
                                         std::ostream& out) {
    out << "t,projection,best_series\n";
    for (std::size_t t = 0; t < proj.values.size(); ++t)
        out << t << ',' << fmt_double(proj.values[t]) << ','
            << fmt_double(best_series(static_cast<Eigen::Index>(t))) << '\n';
}

}  // namespace rmt
