#include <cmath>

#include "helpers.hpp"
#include "rmt/spectrum.hpp"

using namespace rmt;
using Catch::Approx;

TEST_CASE("mp bounds at Q = 4.0625 match the closed form") {
    const MpLaw law = mp_bounds(4.0625);
    REQUIRE(law.lambda_plus == Approx(2.23843).margin(5e-6));
    REQUIRE(law.lambda_minus == Approx(0.253876).margin(5e-6));
    REQUIRE(law.q == 4.0625);
}

TEST_CASE("mp bounds require Q > 1") {
    REQUIRE_THROWS_AS(mp_bounds(1.0), QOutOfRange);
    REQUIRE_THROWS_AS(mp_bounds(0.5), QOutOfRange);
    REQUIRE_NOTHROW(mp_bounds(1.0 + 1e-9));
}

TEST_CASE("mp density is a unit-mass distribution supported on [lambda-, lambda+]") {
    for (double q : {1.5, 4.0625, 10.0}) {
        const MpLaw law = mp_bounds(q);
        REQUIRE(mp_density(law.lambda_minus - 0.01, law) == 0.0);
        REQUIRE(mp_density(law.lambda_plus + 0.01, law) == 0.0);
        REQUIRE(mp_density((law.lambda_minus + law.lambda_plus) / 2.0, law) > 0.0);
        const double mass = integrate([&](double x) { return mp_density(x, law); },
                                      law.lambda_minus, law.lambda_plus, 1e-9);
        REQUIRE(mass == Approx(1.0).margin(1e-6));
        // first moment of the MP law is 1
        const double mean = integrate([&](double x) { return x * mp_density(x, law); },
                                      law.lambda_minus, law.lambda_plus, 1e-9);
        REQUIRE(mean == Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("classification uses strict inequalities") {
    const MpLaw law = mp_bounds(4.0);
    Vector eigs(5);
    eigs << law.lambda_minus - 0.1, law.lambda_minus, 1.0, law.lambda_plus, law.lambda_plus + 0.1;
    const Classification c = classify(eigs, law);
    REQUIRE(c.deviating_below == std::vector<int>{0});
    REQUIRE(c.bulk == std::vector<int>{1, 2, 3});
    REQUIRE(c.deviating_above == std::vector<int>{4});
    REQUIRE(c.p() == 1);
}

TEST_CASE("2x2 correlation matrix has the textbook eigensystem") {
    const double r = 0.6;
    CorrelationMatrix c;
    c.labels = {"a", "b"};
    c.l = 8;  // Q = 4
    c.values.resize(2, 2);
    c.values << 1.0, r, r, 1.0;
    const SpectralResult spec = eigendecompose(c);
    REQUIRE(spec.eigenvalues(0) == Approx(1.0 - r).epsilon(1e-12));
    REQUIRE(spec.eigenvalues(1) == Approx(1.0 + r).epsilon(1e-12));
    const double s = 1.0 / std::sqrt(2.0);
    // sign fix: the peak (tied -> lowest index) component is positive
    REQUIRE(spec.eigenvectors(0, 0) == Approx(s).epsilon(1e-12));
    REQUIRE(std::abs(spec.eigenvectors(1, 0)) == Approx(s).epsilon(1e-12));
    REQUIRE(spec.eigenvectors(0, 1) == Approx(s).epsilon(1e-12));
    REQUIRE(spec.eigenvectors(1, 1) == Approx(s).epsilon(1e-12));
}

TEST_CASE("eigendecomposition reconstructs the matrix with orthonormal vectors") {
    const NormalizedPanel panel = random_normalized_panel(
        {.n = 50, .l = 180, .seed = 21, .variant = EnsembleVariant::RandomCorrelation});
    const CorrelationMatrix c = correlation_matrix(panel);
    const SpectralResult spec = eigendecompose(c);

    REQUIRE(spec.n() == 50);
    for (int k = 1; k < spec.n(); ++k) REQUIRE(spec.eigenvalues(k) >= spec.eigenvalues(k - 1));

    const Matrix identity = Matrix::Identity(50, 50);
    REQUIRE((spec.eigenvectors.transpose() * spec.eigenvectors - identity).cwiseAbs().maxCoeff() <
            1e-10);
    const Matrix rebuilt = spec.eigenvectors * spec.eigenvalues.asDiagonal() *
                           spec.eigenvectors.transpose();
    REQUIRE((rebuilt - c.values).cwiseAbs().maxCoeff() < 1e-10);

    // eigenvalue sum = trace = N
    REQUIRE(spec.eigenvalues.sum() == Approx(50.0).epsilon(1e-10));

    // classification partitions all indices
    REQUIRE(spec.bulk_indices.size() + spec.deviating_above.size() +
                spec.deviating_below.size() ==
            50);
    REQUIRE(spec.mp.q == Approx(180.0 / 50.0));

    // sign convention: every column's peak component is positive
    for (int k = 0; k < spec.n(); ++k) {
        const int peak = detail::peak_index(spec.eigenvectors.col(k));
        REQUIRE(spec.eigenvectors(peak, k) > 0.0);
    }
}

TEST_CASE("degenerate eigenvalue clusters are ordered by peak index") {
    CorrelationMatrix c;
    c.labels = {"a", "b", "c"};
    c.l = 12;
    c.values = Matrix::Identity(3, 3);
    const SpectralResult spec = eigendecompose(c);
    REQUIRE(spec.eigenvalues(0) == 1.0);
    REQUIRE(spec.eigenvalues(2) == 1.0);
    for (int k = 0; k < 3; ++k) {
        REQUIRE(detail::peak_index(spec.eigenvectors.col(k)) == k);
        REQUIRE(spec.eigenvectors(k, k) == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("fix_sign flips a vector whose peak is negative") {
    Vector u(3);
    u << 0.2, -0.9, 0.1;
    fix_sign(u);
    REQUIRE(u(1) == Approx(0.9));
    REQUIRE(u(0) == Approx(-0.2));
    fix_sign(u);  // applying twice is a no-op
    REQUIRE(u(1) == Approx(0.9));
}
