#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rmt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Decimal text that round-trips a double exactly (17 significant digits).
inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Standard normal CDF.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Center a row to mean zero (two passes, so the residual mean is at rounding
// level) and scale to unit population standard deviation. Returns the
// original population sigma; sigma == 0 is left to the caller to handle.
inline double standardize_row(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
    const double n = static_cast<double>(row.size());
    row.array() -= row.sum() / n;
    row.array() -= row.sum() / n;
    const double mean = row.sum() / n;
    const double var = row.array().square().sum() / n - mean * mean;
    const double sigma = std::sqrt(var);
    if (sigma > 0.0) row /= sigma;
    return sigma;
}

namespace detail {

inline double adaptive_simpson_step(const std::function<double(double)>& f,
                                    double a, double b, double fa, double fm,
                                    double fb, double whole, double tol,
                                    int depth, int force) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || (force <= 0 && std::abs(delta) <= 15.0 * tol)) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol,
                                 depth - 1, force - 1) +
           adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol,
                                 depth - 1, force - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with absolute tolerance. The first few levels
// subdivide unconditionally so a narrow feature between coarse probe points
// cannot fake early convergence.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10, int max_depth = 40,
                        int min_depth = 8) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol,
                                         max_depth, min_depth);
}

// Sine integral Si(x) = int_0^x sin(t)/t dt. Power series below 2, Lentz
// continued fraction for E1(ix) above; both good to ~1e-14.
inline double sine_integral(double x) {
    if (x < 0.0) return -sine_integral(-x);
    if (x == 0.0) return 0.0;
    if (x < 2.0) {
        double term = x;
        double sum = x;
        for (int k = 1; k < 60; ++k) {
            const double tk = 2.0 * k;
            term *= -x * x * (tk - 1.0) / (tk * (tk + 1.0) * (tk + 1.0));
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        return sum;
    }
    // E1(ix) = -Ci(x) + i(Si(x) - pi/2), evaluated by modified Lentz.
    const std::complex<double> z(0.0, x);
    const double fpmin = 1e-300;
    std::complex<double> b = z + 1.0;
    std::complex<double> c(1.0 / fpmin, 0.0);
    std::complex<double> d = 1.0 / b;
    std::complex<double> h = d;
    for (int i = 1; i < 200; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const std::complex<double> del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    const std::complex<double> e1 = h * std::exp(-z);
    return M_PI / 2.0 + e1.imag();
}

// sin(pi x)/(pi x), continued by 1 at x = 0.
inline double sine_kernel(double x) {
    const double px = M_PI * x;
    if (std::abs(px) < 1e-6) return 1.0 - px * px / 6.0;
    return std::sin(px) / px;
}

// d/dx sin(pi x)/(pi x).
inline double sine_kernel_derivative(double x) {
    if (std::abs(x) < 1e-4) {
        const double p2 = M_PI * M_PI;
        return -p2 * x / 3.0 + p2 * p2 * x * x * x / 30.0;
    }
    return (std::cos(M_PI * x) - sine_kernel(x)) / x;
}

}  // namespace rmt
