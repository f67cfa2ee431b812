#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "rmt/panel.hpp"

namespace rmt::test {

// Panel from explicit count rows; timestamps are 0, 300, 600, ...
inline TrafficPanel make_panel(std::vector<std::string> labels,
                               std::vector<std::vector<double>> rows) {
    TrafficPanel panel;
    panel.labels = std::move(labels);
    const int n = static_cast<int>(rows.size());
    const int l = static_cast<int>(rows[0].size());
    for (int t = 0; t < l; ++t) panel.timestamps.push_back(300LL * t);
    panel.counts.resize(n, l);
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < l; ++t) panel.counts(i, t) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
    return panel;
}

inline Vector unit_vector(std::initializer_list<double> values) {
    Vector u(static_cast<Eigen::Index>(values.size()));
    int i = 0;
    for (double v : values) u(i++) = v;
    return u / u.norm();
}

}  // namespace rmt::test
