#pragma once

#include "s6v/errors.hpp"

#include <Eigen/Dense>
#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace s6v {

inline constexpr double kPi = boost::math::constants::pi<double>();

struct AiryEval {
    double x = 0.0;
    double ai = 0.0;
    double ai_prime = 0.0;
};

inline AiryEval airy(double x) { return {x, boost::math::airy_ai(x), boost::math::airy_ai_prime(x)}; }

// Airy kernel; on the diagonal Ai'(x)^2 - x Ai(x)^2 (Ai'' = x Ai).
inline double airy_kernel(double x, double y) {
    const AiryEval a = airy(x);
    if (std::abs(x - y) < 1e-6) {
        const double m = 0.5 * (x + y);
        const AiryEval c = airy(m);
        return c.ai_prime * c.ai_prime - m * c.ai * c.ai;
    }
    const AiryEval b = airy(y);
    return (a.ai * b.ai_prime - b.ai * a.ai_prime) / (x - y);
}

inline double airy_kernel_diag(double x) { return airy_kernel(x, x); }

struct AiryDiagAsymptotics {
    double pos_approx = 0.0; // e^{-(4/3)x^{3/2}}/(8 pi x), x > 0
    double neg_approx = 0.0; // |x|^{1/2}/pi, x < 0
};

// Leading-order diagonal asymptotics; only the entry matching the sign of x is filled.
inline AiryDiagAsymptotics airy_diag_asymptotics(double x) {
    if (std::abs(x) < 2.0) throw DomainTooSmall("diagonal asymptotics need |x| >= 2");
    AiryDiagAsymptotics r;
    if (x > 0)
        r.pos_approx = std::exp(-4.0 / 3.0 * std::pow(x, 1.5)) / (8.0 * kPi * x);
    else
        r.neg_approx = std::sqrt(-x) / kPi;
    return r;
}

// Laplace-method tail e^{-(4/3)t^{3/2}}/(16 pi t^{3/2}).
inline double airy_tail_laplace(double t) {
    return std::exp(-4.0 / 3.0 * std::pow(t, 1.5)) / (16.0 * kPi * std::pow(t, 1.5));
}

// int_t^inf A(y,y) dy: adaptive Gauss-Kronrod up to a switch point past which
// the Laplace tail is added.
inline double airy_tail_integral(double t) {
    const double T = std::max(t, 0.0) + 14.0;
    double err = 0.0;
    double acc = 0.0;
    // split the oscillatory negative part into unit panels
    double lo = t;
    while (lo < T) {
        const double hi = std::min(T, lo + (lo < 0 ? 4.0 : 14.0));
        acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(airy_kernel_diag, lo, hi, 12, 1e-14, &err);
        lo = hi;
    }
    return acc + airy_tail_laplace(T);
}

// Closed form of the same integral, (2t^2 Ai^2 - 2t Ai'^2 - Ai Ai')/3.
inline double airy_tail_integral_closed(double t) {
    const AiryEval a = airy(t);
    return (2.0 * t * t * a.ai * a.ai - 2.0 * t * a.ai_prime * a.ai_prime - a.ai * a.ai_prime) / 3.0;
}

// Diagonal of the J0 Bessel kernel, 1/4 (J0(sqrt x)^2 + J1(sqrt x)^2), continued
// to x < 0 as 1/4 (I0(r)^2 - I1(r)^2) with r = sqrt(-x).
inline double bessel_kernel_diag(double x) {
    if (x == 0.0) return 0.25;
    if (x > 0) {
        const double z = std::sqrt(x);
        const double j0 = boost::math::cyl_bessel_j(0, z), j1 = boost::math::cyl_bessel_j(1, z);
        return 0.25 * (j0 * j0 + j1 * j1);
    }
    const double r = std::sqrt(-x);
    if (r < 1e-4) return 0.25 - x / 16.0 + x * x / 128.0;
    const double i0 = boost::math::cyl_bessel_i(0, r), i1 = boost::math::cyl_bessel_i(1, r);
    return 0.25 * (i0 - i1) * (i0 + i1);
}

struct TwTails {
    double upper = 0.0;
    double lower = 0.0;
};

inline TwTails tw_tail_reference(double h) {
    if (!(h > 0)) throw ParameterOutOfRange("h must be > 0");
    return {std::exp(-2.0 / 3.0 * std::pow(h, 1.5)), std::exp(-h * h * h / 12.0)};
}

struct NystromGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1,1] by Newton iteration on P_m.
inline NystromGrid gauss_legendre(int m) {
    if (m < 1) throw ParameterOutOfRange("need at least one node");
    NystromGrid g;
    g.nodes.resize(static_cast<std::size_t>(m));
    g.weights.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (m == 1) p0 = 1.0, p1 = x;
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        if (m == 1) x = 0.0, dp = 1.0;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        g.nodes[static_cast<std::size_t>(i)] = -x;
        g.nodes[static_cast<std::size_t>(m - 1 - i)] = x;
        g.weights[static_cast<std::size_t>(i)] = w;
        g.weights[static_cast<std::size_t>(m - 1 - i)] = w;
    }
    if (m == 1) g.weights[0] = 2.0;
    return g;
}

// Quadrature grid on [lo, hi], or on [lo, inf) through x = lo - L log(1 - xi), xi in (0,1).
inline NystromGrid nystrom_grid(double lo, double hi, int m, double L = 3.0) {
    const NystromGrid g = gauss_legendre(m);
    NystromGrid r;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (std::isinf(hi)) {
            const double xi = 0.5 * (g.nodes[i] + 1.0);
            r.nodes.push_back(lo - L * std::log1p(-xi));
            r.weights.push_back(0.5 * g.weights[i] * L / (1.0 - xi));
        } else {
            r.nodes.push_back(0.5 * (hi - lo) * g.nodes[i] + 0.5 * (hi + lo));
            r.weights.push_back(0.5 * (hi - lo) * g.weights[i]);
        }
    }
    return r;
}

inline double fredholm_det_fixed(const std::function<double(double, double)>& kernel, const NystromGrid& g) {
    const auto m = static_cast<Eigen::Index>(g.nodes.size());
    Eigen::MatrixXd A(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double wi = std::sqrt(g.weights[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = i; j < m; ++j) {
            const double wj = std::sqrt(g.weights[static_cast<std::size_t>(j)]);
            const double v = -wi * kernel(g.nodes[static_cast<std::size_t>(i)], g.nodes[static_cast<std::size_t>(j)]) * wj;
            A(i, j) = v;
            A(j, i) = v;
        }
        A(i, i) += 1.0;
    }
    return Eigen::PartialPivLU<Eigen::MatrixXd>(A).determinant();
}

struct FredholmResult {
    double value = 1.0;
    int nodes = 0;
    double last_change = 0.0;
};

// det(I - K) on L^2(lo, hi) by Nystrom; m doubles until the value moves by < tol.
inline FredholmResult fredholm_det(const std::function<double(double, double)>& kernel, double lo, double hi,
                                   int m0 = 16, double tol = 1e-8, int m_max = 512) {
    FredholmResult r;
    double prev = fredholm_det_fixed(kernel, nystrom_grid(lo, hi, m0));
    for (int m = 2 * m0; m <= m_max; m *= 2) {
        const double cur = fredholm_det_fixed(kernel, nystrom_grid(lo, hi, m));
        r.last_change = std::abs(cur - prev);
        if (r.last_change < tol) {
            r.value = cur;
            r.nodes = m;
            return r;
        }
        prev = cur;
    }
    throw NotConverged("Fredholm determinant changed by " + std::to_string(r.last_change) + " at m=" +
                       std::to_string(m_max));
}

inline double tracy_widom_gue(double s) {
    if (s > 16.0) return 1.0;
    return fredholm_det(airy_kernel, s, std::numeric_limits<double>::infinity()).value;
}

} // namespace s6v
