#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rmt/eigenmodes.hpp"
#include "rmt/errors.hpp"
#include "rmt/report.hpp"

namespace rmt {

struct DetectionThresholds {
    double eig_sigma_mult = 3.0;        // shift fires above mean + mult * sigma
    double eig_sigma_floor_frac = 0.05; // sigma floor as a fraction of the baseline mean
    double ipr_sigma_mult = 3.0;
    double ipr_sigma_floor = 0.25;      // tail counts are small integers
    double overlap_min = 0.7;           // mean |diagonal| below this fires
    double match_min = 0.7;             // a vector with no overlap this strong is "new"/"dropped"
};

struct IndicatorResult {
    bool fired = false;
    double baseline_mean = 0.0;
    double baseline_sigma = 0.0;
    double current = 0.0;
    double threshold = 0.0;

    bool operator==(const IndicatorResult&) const = default;
};

struct OverlapIndicatorResult {
    bool fired = false;
    bool available = false;  // both reports carried a deviating basis
    double mean_abs_diagonal = 0.0;
    double threshold = 0.0;
    std::vector<double> diagonal;  // signed

    bool operator==(const OverlapIndicatorResult&) const = default;
};

struct MigrationEntry {
    int from = -1;  // baseline basis row
    int to = -1;    // current basis row with the largest |overlap|
    double overlap = 0.0;

    bool operator==(const MigrationEntry&) const = default;
};

struct DetectReport {
    IndicatorResult eigenvalue_shift;
    IndicatorResult ipr_tail;
    OverlapIndicatorResult overlap_diagonal;
    bool any_fired = false;
    std::vector<std::string> implicated;
    std::vector<MigrationEntry> migration;

    bool operator==(const DetectReport&) const = default;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

inline std::pair<double, double> mean_sigma(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

inline void add_participants(const std::vector<double>& row,
                             const std::vector<std::string>& labels,
                             std::vector<std::string>& implicated) {
    const Eigen::Map<const Vector> u(row.data(), static_cast<Eigen::Index>(row.size()));
    for (const auto& label : significant_participants(u, labels)) {
        if (std::find(implicated.begin(), implicated.end(), label) == implicated.end())
            implicated.push_back(label);
    }
}

}  // namespace detail

// Compare a monitoring run against its baseline: largest-eigenvalue shift,
// localized-eigenvector (IPR tail) count change, and deviating-basis overlap
// collapse; implicate the members of vectors that appeared or vanished.
inline DetectReport detect(const AnalyzeReport& baseline, const AnalyzeReport& current,
                           const DetectionThresholds& thresholds = {}) {
    if (baseline.labels != current.labels)
        throw IncompatibleReports("reports cover different series panels");
    if (baseline.windows.empty() || current.windows.empty())
        throw IncompatibleReports("report carries no monitoring windows");

    DetectReport out;

    std::vector<double> base_top, base_tail;
    for (const WindowStats& w : baseline.windows) {
        base_top.push_back(w.top_eigenvalue);
        base_tail.push_back(static_cast<double>(w.ipr_tail_count));
    }

    {
        auto [mean, sigma] = detail::mean_sigma(base_top);
        IndicatorResult& r = out.eigenvalue_shift;
        r.baseline_mean = mean;
        r.baseline_sigma = sigma;
        r.current = current.windows.back().top_eigenvalue;
        const double spread = std::max(sigma, thresholds.eig_sigma_floor_frac * std::abs(mean));
        r.threshold = mean + thresholds.eig_sigma_mult * spread;
        r.fired = r.current > r.threshold;
    }
    {
        auto [mean, sigma] = detail::mean_sigma(base_tail);
        IndicatorResult& r = out.ipr_tail;
        r.baseline_mean = mean;
        r.baseline_sigma = sigma;
        r.current = static_cast<double>(current.windows.back().ipr_tail_count);
        const double spread = std::max(sigma, thresholds.ipr_sigma_floor);
        r.threshold = mean + thresholds.ipr_sigma_mult * spread;
        r.fired = r.current > r.threshold;
    }

    const auto& base_vectors = baseline.basis.vectors;
    const auto& cur_vectors = current.basis.vectors;
    for (const auto& row : base_vectors)
        if (static_cast<int>(row.size()) != current.n)
            throw IncompatibleReports("basis dimension does not match panel");
    for (const auto& row : cur_vectors)
        if (static_cast<int>(row.size()) != current.n)
            throw IncompatibleReports("basis dimension does not match panel");

    {
        OverlapIndicatorResult& r = out.overlap_diagonal;
        r.threshold = thresholds.overlap_min;
        r.available = !base_vectors.empty() && !cur_vectors.empty();
        if (r.available) {
            const std::size_t diag = std::min(base_vectors.size(), cur_vectors.size());
            double sum = 0.0;
            for (std::size_t i = 0; i < diag; ++i) {
                const double d = detail::dot(base_vectors[i], cur_vectors[i]);
                r.diagonal.push_back(d);
                sum += std::abs(d);
            }
            r.mean_abs_diagonal = sum / static_cast<double>(diag);
            r.fired = r.mean_abs_diagonal < r.threshold;
        }
    }

    // Current vectors with no strong counterpart in the baseline basis are
    // new structure; baseline vectors with none in the current basis are
    // vanished structure. Both kinds implicate their member series.
    for (const auto& cur : cur_vectors) {
        double best = 0.0;
        for (const auto& base : base_vectors)
            best = std::max(best, std::abs(detail::dot(base, cur)));
        if (best < thresholds.match_min) detail::add_participants(cur, current.labels, out.implicated);
    }
    for (const auto& base : base_vectors) {
        double best = 0.0;
        for (const auto& cur : cur_vectors)
            best = std::max(best, std::abs(detail::dot(base, cur)));
        if (best < thresholds.match_min) detail::add_participants(base, current.labels, out.implicated);
    }

    // Where did each baseline vector go: the strongest-overlap current row.
    for (std::size_t i = 0; i < base_vectors.size(); ++i) {
        MigrationEntry entry;
        entry.from = static_cast<int>(i);
        double best_abs = -1.0;
        for (std::size_t j = 0; j < cur_vectors.size(); ++j) {
            const double d = detail::dot(base_vectors[i], cur_vectors[j]);
            if (std::abs(d) > best_abs) {
                best_abs = std::abs(d);
                entry.to = static_cast<int>(j);
                entry.overlap = d;
            }
        }
        if (entry.to >= 0) out.migration.push_back(entry);
    }

    out.any_fired =
        out.eigenvalue_shift.fired || out.ipr_tail.fired || out.overlap_diagonal.fired;
    return out;
}

// ---------------------------------------------------------------------------
// serialization

inline void to_json(json& j, const IndicatorResult& r) {
    j = json{{"fired", r.fired},
             {"baseline_mean", r.baseline_mean},
             {"baseline_sigma", r.baseline_sigma},
             {"current", r.current},
             {"threshold", r.threshold}};
}
inline void from_json(const json& j, IndicatorResult& r) {
    j.at("fired").get_to(r.fired);
    j.at("baseline_mean").get_to(r.baseline_mean);
    j.at("baseline_sigma").get_to(r.baseline_sigma);
    j.at("current").get_to(r.current);
    j.at("threshold").get_to(r.threshold);
}

inline void to_json(json& j, const OverlapIndicatorResult& r) {
    j = json{{"fired", r.fired},
             {"available", r.available},
             {"mean_abs_diagonal", r.mean_abs_diagonal},
             {"threshold", r.threshold},
             {"diagonal", r.diagonal}};
}
inline void from_json(const json& j, OverlapIndicatorResult& r) {
    j.at("fired").get_to(r.fired);
    j.at("available").get_to(r.available);
    j.at("mean_abs_diagonal").get_to(r.mean_abs_diagonal);
    j.at("threshold").get_to(r.threshold);
    j.at("diagonal").get_to(r.diagonal);
}

inline void to_json(json& j, const MigrationEntry& m) {
    j = json{{"from", m.from}, {"to", m.to}, {"overlap", m.overlap}};
}
inline void from_json(const json& j, MigrationEntry& m) {
    j.at("from").get_to(m.from);
    j.at("to").get_to(m.to);
    j.at("overlap").get_to(m.overlap);
}

inline void to_json(json& j, const DetectReport& r) {
    j = json{{"kind", "detect"},
             {"indicators",
              json{{"eigenvalue_shift", r.eigenvalue_shift},
                   {"ipr_tail", r.ipr_tail},
                   {"overlap_diagonal", r.overlap_diagonal}}},
             {"any_fired", r.any_fired},
             {"implicated", r.implicated},
             {"migration", r.migration}};
}
inline void from_json(const json& j, DetectReport& r) {
    if (j.value("kind", "") != std::string("detect"))
        throw IncompatibleReports("not a detection report");
    const json& ind = j.at("indicators");
    ind.at("eigenvalue_shift").get_to(r.eigenvalue_shift);
    ind.at("ipr_tail").get_to(r.ipr_tail);
    ind.at("overlap_diagonal").get_to(r.overlap_diagonal);
    j.at("any_fired").get_to(r.any_fired);
    j.at("implicated").get_to(r.implicated);
    j.at("migration").get_to(r.migration);
}

// Flat key=value thresholds file; '#' starts a comment.
inline DetectionThresholds parse_thresholds(const std::string& text) {
    const auto trim = [](std::string s) {
        const auto first = s.find_first_not_of(" \t\r");
        if (first == std::string::npos) return std::string();
        const auto last = s.find_last_not_of(" \t\r");
        return s.substr(first, last - first + 1);
    };
    DetectionThresholds t;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("thresholds line " + std::to_string(lineno) + " is not key=value");
        const std::string key = trim(line.substr(0, eq));
        char* end = nullptr;
        const std::string value_text = trim(line.substr(eq + 1));
        const double value = std::strtod(value_text.c_str(), &end);
        if (value_text.empty() || end != value_text.c_str() + value_text.size())
            throw ConfigError("thresholds value for \"" + key + "\" is not numeric");
        if (key == "eig_sigma_mult") t.eig_sigma_mult = value;
        else if (key == "eig_sigma_floor_frac") t.eig_sigma_floor_frac = value;
        else if (key == "ipr_sigma_mult") t.ipr_sigma_mult = value;
        else if (key == "ipr_sigma_floor") t.ipr_sigma_floor = value;
        else if (key == "overlap_min") t.overlap_min = value;
        else if (key == "match_min") t.match_min = value;
        else throw ConfigError("unknown thresholds key \"" + key + "\"");
    }
    return t;
}

}  // namespace rmt
