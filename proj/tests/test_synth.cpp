#include <cmath>
#include <set>
#include <string>

#include "helpers.hpp"
#include "rmt/correlation.hpp"
#include "rmt/eigenmodes.hpp"
#include "rmt/spectrum.hpp"
#include "rmt/synth.hpp"

using namespace rmt;
using Catch::Approx;

namespace {

std::vector<int> range_targets_10(int first) {
    std::vector<int> targets;
    for (int i = 0; i < 10; ++i) targets.push_back(first + i);
    return targets;
}

// Pearson correlation of two series' log-returns inside [start, end).
double span_return_correlation(const TrafficPanel& panel, int i, int j, int start, int end) {
    const int m = end - start - 1;
    Eigen::VectorXd a(m), b(m);
    for (int t = 0; t < m; ++t) {
        a(t) = std::log1p(panel.counts(i, start + t + 1)) - std::log1p(panel.counts(i, start + t));
        b(t) = std::log1p(panel.counts(j, start + t + 1)) - std::log1p(panel.counts(j, start + t));
    }
    a.array() -= a.mean();
    b.array() -= b.mean();
    return a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
}

}  // namespace

TEST_CASE("generate_null is deterministic with the documented shape") {
    const TrafficPanel a = generate_null(5, 20, 123);
    const TrafficPanel b = generate_null(5, 20, 123);
    REQUIRE(a.counts == b.counts);
    REQUIRE(a.timestamps == b.timestamps);
    REQUIRE(a.n() == 5);
    REQUIRE(a.l_raw() == 20);
    REQUIRE(a.labels[0] == "s0");
    REQUIRE(a.labels[4] == "s4");
    REQUIRE(a.dt() == 300);
    for (int i = 0; i < 5; ++i) REQUIRE(a.counts(i, 0) == 1e5);
    REQUIRE((a.counts.array() >= 0.0).all());

    const TrafficPanel c = generate_null(5, 20, 124);
    REQUIRE(a.counts != c.counts);

    REQUIRE_THROWS_AS(generate_null(1, 20, 0), ConfigError);
    REQUIRE_THROWS_AS(generate_null(5, 6, 0), ConfigError);
    REQUIRE_NOTHROW(generate_null(2, 4, 0));
}

TEST_CASE("null panels have near-MP spectra") {
    const TrafficPanel panel = generate_null(50, 501, 7);
    const SpectralResult spec =
        eigendecompose(correlation_matrix(normalize(log_returns(panel))));
    int inside = 0;
    for (int k = 0; k < spec.n(); ++k)
        if (spec.eigenvalues(k) >= spec.mp.lambda_minus &&
            spec.eigenvalues(k) <= spec.mp.lambda_plus)
            ++inside;
    REQUIRE(inside >= 48);  // >= 97% of 50
}

TEST_CASE("injection validation rejects bad specs") {
    const TrafficPanel panel = generate_null(10, 50, 1);
    InjectionSpec spec;
    spec.targets = {0, 1};
    spec.start = 0;
    spec.end = 50;
    spec.kind = InjectionKind::CommonFactor;
    spec.rho = 0.5;

    SECTION("valid spec passes") { REQUIRE_NOTHROW(inject(panel, spec)); }
    SECTION("span out of bounds") {
        spec.end = 51;
        REQUIRE_THROWS_AS(inject(panel, spec), SpanOutOfBounds);
        spec.start = -1;
        spec.end = 50;
        REQUIRE_THROWS_AS(inject(panel, spec), SpanOutOfBounds);
    }
    SECTION("target out of range") {
        spec.targets = {0, 10};
        REQUIRE_THROWS_AS(inject(panel, spec), IndexOutOfBounds);
    }
    SECTION("repeated target") {
        spec.targets = {3, 3};
        REQUIRE_THROWS_AS(inject(panel, spec), IndexOutOfBounds);
    }
    SECTION("factor strength out of range") {
        spec.rho = 0.0;
        REQUIRE_THROWS_AS(inject(panel, spec), ConfigError);
        spec.rho = 1.5;
        REQUIRE_THROWS_AS(inject(panel, spec), ConfigError);
    }
}

TEST_CASE("empty spans and target lists leave the panel bit-identical") {
    const TrafficPanel panel = generate_null(6, 40, 2);
    InjectionSpec spec;
    spec.targets = {1, 2};
    spec.start = 17;
    spec.end = 17;
    spec.kind = InjectionKind::RandomNoise;
    REQUIRE(inject(panel, spec).counts == panel.counts);

    spec.targets = {};
    spec.end = 30;
    REQUIRE(inject(panel, spec).counts == panel.counts);
}

TEST_CASE("injection touches only the target-by-span rectangle") {
    const TrafficPanel panel = generate_null(8, 60, 3);
    InjectionSpec spec;
    spec.targets = {2, 5};
    spec.start = 20;
    spec.end = 40;
    spec.rho = 0.9;
    spec.seed = 9;
    for (InjectionKind kind : {InjectionKind::CommonFactor, InjectionKind::Sine,
                               InjectionKind::Quadratic, InjectionKind::RandomNoise}) {
        spec.kind = kind;
        const TrafficPanel out = inject(panel, spec);
        for (int i = 0; i < 8; ++i)
            for (int t = 0; t < 60; ++t) {
                const bool targeted = (i == 2 || i == 5) && t >= 20 && t < 40;
                if (!targeted) {
                    INFO(injection_kind_name(kind) << " series " << i << " t " << t);
                    REQUIRE(out.counts(i, t) == panel.counts(i, t));
                }
            }
        REQUIRE(inject(panel, spec).counts == out.counts);  // deterministic
    }
}

TEST_CASE("common-factor injection raises pairwise correlation to about rho^2") {
    const TrafficPanel panel = generate_null(4, 4001, 5);
    InjectionSpec spec;
    spec.targets = {0, 1};
    spec.start = 0;
    spec.end = 4001;
    spec.kind = InjectionKind::CommonFactor;
    spec.rho = 0.8;
    spec.seed = 11;
    const TrafficPanel out = inject(panel, spec);
    const double c01 = span_return_correlation(out, 0, 1, 0, 4001);
    REQUIRE(c01 == Approx(0.64).margin(0.05));
    // non-targets stay uncorrelated
    const double c23 = span_return_correlation(out, 2, 3, 0, 4001);
    REQUIRE(std::abs(c23) < 0.08);
    // target keeps its own variance scale
    const double c02 = span_return_correlation(out, 0, 2, 0, 4001);
    REQUIRE(std::abs(c02) < 0.08);
}

TEST_CASE("full-span common factor creates one dominant eigenvalue") {
    const int n = 50, k = 20;
    TrafficPanel panel = generate_null(n, 2001, 13);
    InjectionSpec spec;
    for (int i = 0; i < k; ++i) spec.targets.push_back(i);
    spec.start = 0;
    spec.end = 2001;
    spec.kind = InjectionKind::CommonFactor;
    spec.rho = 0.9;
    spec.seed = 17;
    const SpectralResult sp =
        eigendecompose(correlation_matrix(normalize(log_returns(inject(panel, spec)))));
    const double top = sp.eigenvalues(sp.n() - 1);
    // rank-one estimate: 1 + (k-1) * rho^2
    REQUIRE(top > sp.mp.lambda_plus);
    REQUIRE(top == Approx(1.0 + (k - 1) * 0.81).epsilon(0.15));
    const double i = ipr(sp.eigenvectors.col(sp.n() - 1));
    REQUIRE(1.0 / i >= k / 2.0);
    REQUIRE(1.0 / i <= 2.0 * k);
}

TEST_CASE("sine injection adds the documented periodic log component") {
    const TrafficPanel panel = generate_null(3, 120, 19);
    InjectionSpec spec;
    spec.targets = {1};
    spec.start = 24;
    spec.end = 96;
    spec.kind = InjectionKind::Sine;
    const TrafficPanel out = inject(panel, spec);
    // quarter period after the start: log-count raised by ~0.1
    const int peak_t = 24 + 6;
    const double shift =
        std::log1p(out.counts(1, peak_t)) - std::log1p(panel.counts(1, peak_t));
    REQUIRE(shift == Approx(0.1).margin(1e-4));
    // half period: sin = 0, the count is bit-identical
    REQUIRE(out.counts(1, 24 + 12) == panel.counts(1, 24 + 12));
    // three quarters: lowered by ~0.1
    const double dip =
        std::log1p(out.counts(1, 24 + 18)) - std::log1p(panel.counts(1, 24 + 18));
    REQUIRE(dip == Approx(-0.1).margin(1e-4));
}

TEST_CASE("quadratic injection ramps the log shift to its 0.1 peak") {
    const TrafficPanel panel = generate_null(3, 200, 23);
    InjectionSpec spec;
    spec.targets = {0};
    spec.start = 50;
    spec.end = 150;
    spec.kind = InjectionKind::Quadratic;
    const TrafficPanel out = inject(panel, spec);
    double prev = 0.0;
    for (int t = 51; t < 150; ++t) {
        const double shift = std::log1p(out.counts(0, t)) - std::log1p(panel.counts(0, t));
        REQUIRE(shift >= prev - 1e-4);  // rounding to counts allows tiny dips
        prev = shift;
    }
    const double peak = std::log1p(out.counts(0, 149)) - std::log1p(panel.counts(0, 149));
    REQUIRE(peak == Approx(0.1).margin(1e-4));
}

TEST_CASE("deviating vectors separate target groups by injection type") {
    // Two disjoint groups, two temporal characters: a deterministic periodic
    // drive on one and a stochastic shared factor on the other. Each should
    // surface as its own deviating vector whose strongest components are
    // exactly its own group, with a common sign inside the group.
    const int n = 100, l_raw = 2015;
    TrafficPanel panel = generate_null(n, l_raw, 41);

    InjectionSpec periodic;
    periodic.targets = range_targets_10(10);
    periodic.start = 0;
    periodic.end = l_raw;
    periodic.kind = InjectionKind::Sine;
    panel = inject(panel, periodic);

    InjectionSpec factor;
    factor.targets = range_targets_10(50);
    factor.start = 0;
    factor.end = l_raw;
    factor.kind = InjectionKind::CommonFactor;
    factor.rho = 0.7;
    factor.seed = 43;
    panel = inject(panel, factor);

    const SpectralResult sp =
        eigendecompose(correlation_matrix(normalize(log_returns(panel))));
    REQUIRE(sp.p() >= 2);

    // Descending: the factor mode (~1 + 9 rho^2) tops the periodic mode.
    const int factor_idx = sp.deviating_above.back();
    const int periodic_idx = sp.deviating_above[sp.deviating_above.size() - 2];
    REQUIRE(sp.eigenvalues(factor_idx) > sp.eigenvalues(periodic_idx));

    const auto group_of = [&](int index, int first_target) {
        const Vector u = sp.eigenvectors.col(index);
        const auto participants = significant_participants(u, sp.labels);
        REQUIRE(participants.size() >= 10);
        std::set<std::string> top10(participants.begin(), participants.begin() + 10);
        std::set<std::string> expect;
        for (int t : range_targets_10(first_target)) expect.insert("s" + std::to_string(t));
        CHECK(top10 == expect);
        int positive = 0;
        for (int t : range_targets_10(first_target)) positive += u(t) > 0.0 ? 1 : 0;
        CHECK((positive == 0 || positive == 10));  // one sign per group
    };
    group_of(factor_idx, 50);
    group_of(periodic_idx, 10);
}

TEST_CASE("the quadratic trend is invisible to return correlations") {
    // A slow trend peaking at 0.1 log-units spreads its derivative across the
    // whole span, so the per-step common component is orders of magnitude
    // below the step noise: the return spectrum must not budge.
    const int n = 50, l_raw = 2001;
    const TrafficPanel panel = generate_null(n, l_raw, 47);
    InjectionSpec trend;
    trend.targets = range_targets_10(0);
    trend.start = 0;
    trend.end = l_raw;
    trend.kind = InjectionKind::Quadratic;
    const TrafficPanel out = inject(panel, trend);

    const SpectralResult before =
        eigendecompose(correlation_matrix(normalize(log_returns(panel))));
    const SpectralResult after =
        eigendecompose(correlation_matrix(normalize(log_returns(out))));
    REQUIRE(after.p() == before.p());
    REQUIRE(after.eigenvalues(after.n() - 1) ==
            Approx(before.eigenvalues(before.n() - 1)).margin(0.02));
}

TEST_CASE("random-noise injection destroys in-span correlation") {
    // Start from a strongly correlated pair, then overwrite one member.
    TrafficPanel panel = generate_null(3, 2001, 29);
    InjectionSpec factor;
    factor.targets = {0, 1};
    factor.start = 0;
    factor.end = 2001;
    factor.kind = InjectionKind::CommonFactor;
    factor.rho = 0.95;
    factor.seed = 31;
    panel = inject(panel, factor);
    REQUIRE(span_return_correlation(panel, 0, 1, 0, 2001) > 0.8);

    InjectionSpec noise;
    noise.targets = {1};
    noise.start = 1000;
    noise.end = 2001;
    noise.kind = InjectionKind::RandomNoise;
    noise.seed = 37;
    const TrafficPanel broken = inject(panel, noise);
    REQUIRE(span_return_correlation(broken, 0, 1, 0, 1000) > 0.8);
    REQUIRE(std::abs(span_return_correlation(broken, 0, 1, 1001, 2001)) < 0.1);
}

TEST_CASE("ground truth masks the union of spec rectangles") {
    REQUIRE(ground_truth({}, 3, 5) == Eigen::MatrixXi::Zero(3, 5));

    InjectionSpec a;
    a.targets = {0};
    a.start = 1;
    a.end = 3;
    InjectionSpec b;
    b.targets = {0, 2};
    b.start = 2;
    b.end = 4;
    const Eigen::MatrixXi mask = ground_truth({a, b}, 3, 5);
    Eigen::MatrixXi expect(3, 5);
    expect << 0, 1, 1, 1, 0,
              0, 0, 0, 0, 0,
              0, 0, 1, 1, 0;
    REQUIRE(mask == expect);

    InjectionSpec bad;
    bad.targets = {5};
    bad.start = 0;
    bad.end = 1;
    REQUIRE_THROWS_AS(ground_truth({bad}, 3, 5), IndexOutOfBounds);
}
