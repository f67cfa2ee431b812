#pragma once

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rmt/errors.hpp"
#include "rmt/numeric.hpp"

namespace rmt {

// Raw panel: N labeled series of equally spaced non-negative counts.
struct TrafficPanel {
    std::vector<std::string> labels;
    std::vector<long long> timestamps;  // strictly increasing, constant gap
    Matrix counts;                      // N x L_raw

    int n() const { return static_cast<int>(counts.rows()); }
    int l_raw() const { return static_cast<int>(counts.cols()); }
    long long dt() const { return timestamps[1] - timestamps[0]; }
};

// Per-series log-ratio rate changes plus the moments used downstream.
struct ReturnsPanel {
    std::vector<std::string> labels;
    Matrix g;      // N x L, L = L_raw - 1
    Vector mean;   // per-series mean of g
    Vector sigma;  // per-series population std of g

    int n() const { return static_cast<int>(g.rows()); }
    int l() const { return static_cast<int>(g.cols()); }
};

// Rate changes centered and scaled to unit population std per series.
struct NormalizedPanel {
    std::vector<std::string> labels;
    Matrix g;      // N x L
    Vector sigma;  // σ_i each row was divided by

    int n() const { return static_cast<int>(g.rows()); }
    int l() const { return static_cast<int>(g.cols()); }
    double q() const { return static_cast<double>(g.cols()) / static_cast<double>(g.rows()); }
};

struct ExclusionEntry {
    std::string label;
    int distinct_values = 0;
    std::string reason;
};

namespace detail {

inline void check_unique_labels(const std::vector<std::string>& labels) {
    std::unordered_set<std::string> seen;
    for (const auto& l : labels) {
        if (!seen.insert(l).second) throw DuplicateLabel("duplicate series label \"" + l + "\"");
    }
}

inline std::vector<std::string> split_csv_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return fields;
}

inline double parse_count(const std::string& s) {
    if (s.empty()) throw MalformedRow("empty count field");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw MalformedRow("non-numeric count \"" + s + "\"");
    if (!std::isfinite(v)) throw MalformedRow("non-finite count \"" + s + "\"");
    if (v < 0.0) throw MalformedRow("negative count \"" + s + "\"");
    return v;
}

inline long long parse_timestamp(const std::string& s) {
    if (s.empty()) throw MalformedRow("empty timestamp field");
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) throw MalformedRow("non-integer timestamp \"" + s + "\"");
    return v;
}

}  // namespace detail

// Structural checks shared by every TrafficPanel producer.
inline void validate_panel(const TrafficPanel& panel) {
    const int n = panel.n();
    const int l = panel.l_raw();
    if (n < 1) throw InvalidPanel("panel has no series");
    if (static_cast<int>(panel.labels.size()) != n)
        throw InvalidPanel("label count does not match series count");
    if (static_cast<int>(panel.timestamps.size()) != l)
        throw InvalidPanel("timestamp count does not match observation count");
    if (l < 2) throw InvalidPanel("panel needs at least 2 observations");
    detail::check_unique_labels(panel.labels);
    const long long dt = panel.timestamps[1] - panel.timestamps[0];
    if (dt <= 0) throw UnequalSpacing("timestamps not strictly increasing");
    for (int t = 1; t < l; ++t) {
        if (panel.timestamps[t] - panel.timestamps[t - 1] != dt)
            throw UnequalSpacing("timestamp gap differs at index " + std::to_string(t));
    }
    if ((panel.counts.array() < 0.0).any()) throw InvalidPanel("negative count value");
}

// CSV with header "timestamp,<label1>,...,<labelN>"; rows sorted chronologically.
inline TrafficPanel parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw MalformedRow("missing header row");
    auto header = detail::split_csv_line(std::move(line));
    if (header.empty() || header[0] != "timestamp")
        throw MalformedRow("header must start with \"timestamp\"");
    TrafficPanel panel;
    panel.labels.assign(header.begin() + 1, header.end());
    if (panel.labels.empty()) throw MalformedRow("header has no series labels");
    const std::size_t n = panel.labels.size();

    std::vector<std::pair<long long, std::vector<double>>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = detail::split_csv_line(std::move(line));
        if (fields.size() != n + 1)
            throw MalformedRow("expected " + std::to_string(n + 1) + " fields, got " +
                               std::to_string(fields.size()));
        std::vector<double> counts(n);
        const long long ts = detail::parse_timestamp(fields[0]);
        for (std::size_t i = 0; i < n; ++i) counts[i] = detail::parse_count(fields[i + 1]);
        rows.emplace_back(ts, std::move(counts));
    }
    if (rows.size() < 2) throw InvalidPanel("panel needs at least 2 data rows");
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    panel.timestamps.reserve(rows.size());
    panel.counts.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        panel.timestamps.push_back(rows[t].first);
        for (std::size_t i = 0; i < n; ++i) panel.counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = rows[t].second[i];
    }
    validate_panel(panel);
    return panel;
}

// Inverse of parse_csv; counts emitted with full round-trip precision.
inline void write_csv(const TrafficPanel& panel, std::ostream& out) {
    out << "timestamp";
    for (const auto& l : panel.labels) out << ',' << l;
    out << '\n';
    for (int t = 0; t < panel.l_raw(); ++t) {
        out << panel.timestamps[static_cast<std::size_t>(t)];
        for (int i = 0; i < panel.n(); ++i) out << ',' << fmt_double(panel.counts(i, t));
        out << '\n';
    }
}

enum class Direction { In, Out };

// MRTG-style log: "unixtime avg_in avg_out max_in max_out", newest first.
// Keeps only the finest consolidation tier (gap <= dt from the previously
// retained row); duplicate timestamps collapse to the first occurrence.
inline TrafficPanel parse_mrtg_log(std::istream& in, Direction direction,
                                   const std::string& label, long long dt = 300) {
    struct Row {
        long long ts;
        double avg_in, avg_out;
    };
    std::vector<Row> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::vector<std::string> parts;
        std::string part;
        while (fields >> part) parts.push_back(part);
        if (parts.size() != 5)
            throw MalformedRow("expected 5 whitespace-separated fields, got " +
                               std::to_string(parts.size()));
        Row row{};
        row.ts = detail::parse_timestamp(parts[0]);
        row.avg_in = detail::parse_count(parts[1]);
        row.avg_out = detail::parse_count(parts[2]);
        detail::parse_count(parts[3]);
        detail::parse_count(parts[4]);
        rows.push_back(row);
    }
    if (rows.empty()) throw EmptyLog("log \"" + label + "\" has no data rows");

    std::vector<Row> kept;
    kept.push_back(rows[0]);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const long long gap = kept.back().ts - rows[i].ts;
        if (gap < 0) throw MalformedRow("log rows not newest-first at line " + std::to_string(i + 1));
        if (gap == 0 || gap > dt) continue;  // duplicate / coarser tier
        kept.push_back(rows[i]);
    }
    std::reverse(kept.begin(), kept.end());

    TrafficPanel panel;
    panel.labels = {label};
    panel.timestamps.reserve(kept.size());
    panel.counts.resize(1, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t t = 0; t < kept.size(); ++t) {
        panel.timestamps.push_back(kept[t].ts);
        panel.counts(0, static_cast<Eigen::Index>(t)) =
            direction == Direction::In ? kept[t].avg_in : kept[t].avg_out;
    }
    validate_panel(panel);
    return panel;
}

// Align panels on their common timestamps and stack the series.
inline TrafficPanel merge_panels(const std::vector<TrafficPanel>& panels) {
    if (panels.empty()) throw InvalidPanel("no panels to merge");
    std::set<long long> common(panels[0].timestamps.begin(), panels[0].timestamps.end());
    for (std::size_t p = 1; p < panels.size(); ++p) {
        std::set<long long> next;
        for (long long ts : panels[p].timestamps)
            if (common.count(ts)) next.insert(ts);
        common.swap(next);
    }
    if (common.size() < 2) throw InvalidPanel("panels share fewer than 2 timestamps");

    TrafficPanel merged;
    merged.timestamps.assign(common.begin(), common.end());
    int n_total = 0;
    for (const auto& p : panels) n_total += p.n();
    merged.counts.resize(n_total, static_cast<Eigen::Index>(merged.timestamps.size()));
    int row = 0;
    for (const auto& p : panels) {
        std::unordered_map<long long, int> col_of;
        for (std::size_t t = 0; t < p.timestamps.size(); ++t)
            col_of[p.timestamps[t]] = static_cast<int>(t);
        for (int i = 0; i < p.n(); ++i) {
            merged.labels.push_back(p.labels[static_cast<std::size_t>(i)]);
            for (std::size_t t = 0; t < merged.timestamps.size(); ++t)
                merged.counts(row, static_cast<Eigen::Index>(t)) =
                    p.counts(i, col_of.at(merged.timestamps[t]));
            ++row;
        }
    }
    validate_panel(merged);
    return merged;
}

// Drop series with fewer than min_distinct distinct count values.
inline std::pair<TrafficPanel, std::vector<ExclusionEntry>> exclude_inactive(
    const TrafficPanel& panel, int min_distinct = 2) {
    if (min_distinct < 2) throw ConfigError("min_distinct must be at least 2");
    std::vector<int> keep;
    std::vector<ExclusionEntry> report;
    for (int i = 0; i < panel.n(); ++i) {
        std::set<double> values;
        for (int t = 0; t < panel.l_raw(); ++t) values.insert(panel.counts(i, t));
        const int distinct = static_cast<int>(values.size());
        if (distinct >= min_distinct) {
            keep.push_back(i);
        } else {
            report.push_back({panel.labels[static_cast<std::size_t>(i)], distinct,
                              distinct <= 1 ? "constant" : "low-diversity"});
        }
    }
    if (keep.empty()) throw AllExcluded("no active series remain");

    TrafficPanel out;
    out.timestamps = panel.timestamps;
    out.counts.resize(static_cast<Eigen::Index>(keep.size()), panel.counts.cols());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        out.labels.push_back(panel.labels[static_cast<std::size_t>(keep[r])]);
        out.counts.row(static_cast<Eigen::Index>(r)) = panel.counts.row(keep[r]);
    }
    return {std::move(out), std::move(report)};
}

// G_i(t) = ln(T_i(t+dt)+1) - ln(T_i(t)+1); the +1 offset applies everywhere.
inline ReturnsPanel log_returns(const TrafficPanel& panel) {
    validate_panel(panel);
    const int n = panel.n();
    const int l = panel.l_raw() - 1;
    ReturnsPanel out;
    out.labels = panel.labels;
    out.g.resize(n, l);
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < l; ++t)
            out.g(i, t) = std::log1p(panel.counts(i, t + 1)) - std::log1p(panel.counts(i, t));
    out.mean.resize(n);
    out.sigma.resize(n);
    for (int i = 0; i < n; ++i) {
        const double m = out.g.row(i).mean();
        out.mean(i) = m;
        out.sigma(i) = std::sqrt((out.g.row(i).array() - m).square().sum() / l);
    }
    return out;
}

// g_i(t) = (G_i(t) - <G_i>)/σ_i, exact to rounding level row by row.
inline NormalizedPanel normalize(const ReturnsPanel& returns) {
    NormalizedPanel out;
    out.labels = returns.labels;
    out.g = returns.g;
    out.sigma.resize(out.g.rows());
    for (int i = 0; i < out.n(); ++i) {
        const double sigma = standardize_row(out.g.row(i));
        if (sigma == 0.0) throw ZeroVariance(out.labels[static_cast<std::size_t>(i)]);
        out.sigma(i) = sigma;
    }
    return out;
}

// Column window [start, end) of a normalized panel, re-standardized so the
// window again satisfies the mean-0 / std-1 row invariants.
inline NormalizedPanel slice_window(const NormalizedPanel& panel, int start, int end) {
    if (start < 0 || end > panel.l() || start >= end)
        throw SpanOutOfBounds("window [" + std::to_string(start) + ", " + std::to_string(end) +
                              ") out of bounds for " + std::to_string(panel.l()) + " observations");
    NormalizedPanel out;
    out.labels = panel.labels;
    out.g = panel.g.middleCols(start, end - start);
    out.sigma.resize(out.g.rows());
    for (int i = 0; i < out.n(); ++i) {
        const double sigma = standardize_row(out.g.row(i));
        if (sigma == 0.0) throw ZeroVariance(out.labels[static_cast<std::size_t>(i)]);
        out.sigma(i) = panel.sigma(i) * sigma;
    }
    return out;
}

}  // namespace rmt
