#pragma once

#include "s6v/errors.hpp"
#include "s6v/special.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace s6v {

// The solution is carried as w = sqrt(u), which satisfies w'' = y w + 2 w^3;
// u'' = 4u^2 + 2yu + u'^2/(2u) follows by substitution.
struct P34Solution {
    double L_minus = 0.0, L_plus = 0.0, h = 0.0;
    std::vector<double> y, w, w_prime;
    std::vector<double> u, u_prime;
    double newton_residual = 0.0; // max |Numerov defect| / h^2
    int newton_iterations = 0;

    std::size_t size() const { return y.size(); }
};

namespace detail {

inline double p34_rhs(double y, double w) { return y * w + 2.0 * w * w * w; }

inline std::vector<double> numerov_defect(const std::vector<double>& y, const std::vector<double>& w, double h) {
    const std::size_t n = y.size();
    std::vector<double> r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i)
        r[i] = w[i + 1] - 2.0 * w[i] + w[i - 1] -
               h * h / 12.0 * (p34_rhs(y[i + 1], w[i + 1]) + 10.0 * p34_rhs(y[i], w[i]) + p34_rhs(y[i - 1], w[i - 1]));
    return r;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Thomas algorithm; sub[i], dia[i], sup[i] are the entries of row i.
inline std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> dia, std::vector<double> sup,
                                             std::vector<double> rhs) {
    const std::size_t n = dia.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = sub[i] / dia[i - 1];
        dia[i] -= m * sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / dia[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / dia[i];
    return x;
}

} // namespace detail

inline double p34_upper_boundary(double L) { return std::exp(-4.0 / 3.0 * std::pow(L, 1.5)) / (4.0 * kPi * std::sqrt(L)); }
inline double p34_lower_boundary(double L) { return L / 2.0 - 1.0 / (8.0 * L * L); }

// Two-point BVP on [-L_minus, L_plus] with mesh h: fourth-order Numerov
// discretisation, damped Newton with backtracking on the defect norm.
inline P34Solution solve_p34(double L_minus, double L_plus, double tol = 1e-8, double h = 1.0 / 64.0,
                             int max_iter = 60) {
    if (L_minus < 6.0 || L_plus < 6.0) throw ParameterOutOfRange("solve_p34 needs L_minus, L_plus >= 6");
    const int cells = static_cast<int>(std::lround((L_minus + L_plus) / h));
    if (cells < 8) throw ParameterOutOfRange("mesh too coarse");
    h = (L_minus + L_plus) / cells;
    P34Solution s;
    s.L_minus = L_minus;
    s.L_plus = L_plus;
    s.h = h;
    const std::size_t n = static_cast<std::size_t>(cells) + 1;
    s.y.resize(n);
    s.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = -L_minus + h * static_cast<double>(i);
        s.y[i] = y;
        const double sw = 1.0 / (1.0 + std::exp(-2.0 * y));
        s.w[i] = sw * airy(y).ai + (1.0 - sw) * std::sqrt(std::max(-0.5 * y, 0.0) + 0.01);
    }
    s.w.front() = std::sqrt(p34_lower_boundary(L_minus));
    s.w.back() = std::sqrt(p34_upper_boundary(L_plus));

    const double h2 = h * h / 12.0;
    std::vector<double> r = detail::numerov_defect(s.y, s.w, h);
    double norm = detail::max_abs(r);
    int it = 0;
    for (; it < max_iter && norm / (h * h) > tol; ++it) {
        const std::size_t m = n - 2;
        std::vector<double> sub(m), dia(m), sup(m), rhs(m);
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = k + 1;
            auto dfdw = [&](std::size_t j) { return s.y[j] + 6.0 * s.w[j] * s.w[j]; };
            sub[k] = 1.0 - h2 * dfdw(i - 1);
            dia[k] = -2.0 - 10.0 * h2 * dfdw(i);
            sup[k] = 1.0 - h2 * dfdw(i + 1);
            rhs[k] = -r[i];
        }
        const std::vector<double> dw = detail::solve_tridiagonal(sub, dia, sup, rhs);
        double lambda = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
            std::vector<double> trial = s.w;
            for (std::size_t k = 0; k < m; ++k) trial[k + 1] += lambda * dw[k];
            const std::vector<double> rt = detail::numerov_defect(s.y, trial, h);
            const double nt = detail::max_abs(rt);
            if (std::isfinite(nt) && nt < norm * (1.0 - 1e-4 * lambda) + 1e-300) {
                s.w = std::move(trial);
                r = rt;
                norm = nt;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    s.newton_iterations = it;
    s.newton_residual = norm / (h * h);
    if (!(s.newton_residual <= tol))
        throw NewtonDiverged("Numerov defect " + std::to_string(s.newton_residual) + " after " + std::to_string(it) +
                             " Newton steps");
    for (std::size_t i = 0; i < n; ++i)
        if (!(s.w[i] > 0.0)) throw PoleDetected("solution crosses zero at y=" + std::to_string(s.y[i]));

    // w' from the Numerov-consistent central formula, one-sided at the ends.
    s.w_prime.resize(n);
    auto f = [&](std::size_t j) { return detail::p34_rhs(s.y[j], s.w[j]); };
    for (std::size_t i = 1; i + 1 < n; ++i)
        s.w_prime[i] = (s.w[i + 1] - s.w[i - 1]) / (2.0 * h) - h * (f(i + 1) - f(i - 1)) / 12.0;
    s.w_prime[0] = (-25.0 * s.w[0] + 48.0 * s.w[1] - 36.0 * s.w[2] + 16.0 * s.w[3] - 3.0 * s.w[4]) / (12.0 * h);
    s.w_prime[n - 1] = (25.0 * s.w[n - 1] - 48.0 * s.w[n - 2] + 36.0 * s.w[n - 3] - 16.0 * s.w[n - 4] + 3.0 * s.w[n - 5]) /
                       (12.0 * h);
    s.u.resize(n);
    s.u_prime.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.u[i] = s.w[i] * s.w[i];
        s.u_prime[i] = 2.0 * s.w[i] * s.w_prime[i];
    }
    return s;
}

struct P34Point {
    double w = 0.0, w_prime = 0.0;
};

// Quintic Hermite interpolation of w using w, w' and w'' = yw + 2w^3 at the cell ends.
inline P34Point p34_eval(const P34Solution& s, double y) {
    if (!(y >= s.y.front() && y <= s.y.back())) throw OutOfRange("y outside the solved grid");
    std::size_t i = static_cast<std::size_t>(std::floor((y - s.y.front()) / s.h));
    i = std::min(i, s.size() - 2);
    const double h = s.h, t = (y - s.y[i]) / h;
    const double p0 = s.w[i], p1 = s.w[i + 1];
    const double m0 = s.w_prime[i] * h, m1 = s.w_prime[i + 1] * h;
    const double a0 = detail::p34_rhs(s.y[i], p0) * h * h, a1 = detail::p34_rhs(s.y[i + 1], p1) * h * h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5, H1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double H2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5), H3 = 0.5 * (t3 - 2 * t4 + t5);
    const double H4 = -4 * t3 + 7 * t4 - 3 * t5, H5 = 10 * t3 - 15 * t4 + 6 * t5;
    const double D0 = -30 * t2 + 60 * t3 - 30 * t4, D1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
    const double D2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4), D3 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
    const double D4 = -12 * t2 + 28 * t3 - 15 * t4, D5 = 30 * t2 - 60 * t3 + 30 * t4;
    P34Point r;
    r.w = H0 * p0 + H1 * m0 + H2 * a0 + H3 * a1 + H4 * m1 + H5 * p1;
    r.w_prime = (D0 * p0 + D1 * m0 + D2 * a0 + D3 * a1 + D4 * m1 + D5 * p1) / h;
    return r;
}

inline double p34_u(const P34Solution& s, double y) {
    const double w = p34_eval(s, y).w;
    return w * w;
}

// Lower-tail continuation u = -y/2 - 1/(8y^2).
inline double p34_kernel_lower_tail(double y) {
    const double u = -0.5 * y - 1.0 / (8.0 * y * y);
    const double up = -0.5 + 1.0 / (4.0 * y * y * y);
    return -u * u - y * u + up * up / (4.0 * u);
}

// Upper-tail continuation with w = Ai: A(y,y) - Ai(y)^4.
inline double p34_kernel_upper_tail(double y) {
    const double ai = airy(y).ai;
    return airy_kernel_diag(y) - ai * ai * ai * ai;
}

// K(0,0|y) = -u^2 - yu + u'^2/(4u) = w'^2 - y w^2 - w^4.
inline double p34_kernel_diag(const P34Solution& s, double y) {
    if (!std::isfinite(y)) throw OutOfRange("y must be finite");
    if (y > s.y.back()) return p34_kernel_upper_tail(y);
    if (y < s.y.front()) return p34_kernel_lower_tail(y);
    const P34Point p = p34_eval(s, y);
    const double u = p.w * p.w;
    return p.w_prime * p.w_prime - y * u - u * u;
}

// 1/2 u'' - 3u^2 - 2yu at grid node i with u'' from a five-point stencil on u.
inline double p34_kernel_diag_raw(const P34Solution& s, std::size_t i) {
    if (i < 2 || i + 2 >= s.size()) throw OutOfRange("raw kernel needs two neighbours on each side");
    const auto& u = s.u;
    const double upp = (-u[i + 2] + 16 * u[i + 1] - 30 * u[i] + 16 * u[i - 1] - u[i - 2]) / (12.0 * s.h * s.h);
    return 0.5 * upp - 3.0 * u[i] * u[i] - 2.0 * s.y[i] * u[i];
}

// max |u'' - 4u^2 - 2yu - u'^2/(2u)| over interior nodes, u'' by the same stencil.
inline double p34_ode_residual(const P34Solution& s) {
    double m = 0.0;
    const auto& u = s.u;
    for (std::size_t i = 2; i + 2 < s.size(); ++i) {
        const double upp = (-u[i + 2] + 16 * u[i + 1] - 30 * u[i] + 16 * u[i - 1] - u[i - 2]) / (12.0 * s.h * s.h);
        const double r = upp - 4 * u[i] * u[i] - 2 * s.y[i] * u[i] - s.u_prime[i] * s.u_prime[i] / (2 * u[i]);
        m = std::max(m, std::abs(r));
    }
    return m;
}

// int_{y0}^inf K(0,0|y) dy: five-point Gauss per grid cell on the interpolant,
// the upper tail by the Airy form, anything below -L_minus by the lower-tail form.
inline double p34_tail_integral(const P34Solution& s, double y0) {
    static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
    static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
    auto segment = [&](double a, double b) {
        double acc = 0.0;
        for (int k = 0; k < 5; ++k) acc += gw[k] * p34_kernel_diag(s, 0.5 * (b - a) * gx[k] + 0.5 * (a + b));
        return 0.5 * (b - a) * acc;
    };
    double acc = 0.0;
    const double top = s.y.back();
    if (y0 >= top) {
        double err = 0.0;
        return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(p34_kernel_upper_tail, y0, y0 + 20.0, 10,
                                                                             1e-14, &err);
    }
    double err = 0.0;
    acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(p34_kernel_upper_tail, top, top + 20.0, 10, 1e-14,
                                                                        &err);
    double lo = y0;
    if (y0 < s.y.front()) {
        acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(p34_kernel_lower_tail, y0, s.y.front(), 12,
                                                                            1e-14, &err);
        lo = s.y.front();
    }
    std::size_t i = static_cast<std::size_t>(std::floor((lo - s.y.front()) / s.h));
    i = std::min(i, s.size() - 2);
    acc += segment(lo, s.y[i + 1]);
    for (std::size_t j = i + 1; j + 1 < s.size(); ++j) acc += segment(s.y[j], s.y[j + 1]);
    return acc;
}

struct PiiCrosscheck {
    double max_pii_residual = 0.0;   // |p'' - yp - 2p^3 + 1/2|
    double max_riccati_defect = 0.0; // |p' + p^2 + y/2 - U|
    double max_roundtrip_error = 0.0;
    double max_riccati_drift = 0.0;  // RK4-integrated p versus the closed form
    int points = 0;
};

// U(y) = 2^{1/3} u(-2^{-1/3} y) = p' + p^2 + y/2 with p = -2^{-1/3} w'/w at x = -2^{-1/3} y.
inline PiiCrosscheck p34_from_pii_crosscheck(const P34Solution& s, double y_lo = -4.0, double y_hi = 4.0,
                                             double step = 0.05) {
    const double c = std::cbrt(0.5);
    auto x_of = [&](double y) { return -c * y; };
    auto p_of = [&](double y) {
        const P34Point q = p34_eval(s, x_of(y));
        return -c * q.w_prime / q.w;
    };
    auto U_of = [&](double y) { return p34_u(s, x_of(y)) / c; };
    PiiCrosscheck r;
    const double d = 0.02;
    for (double y = y_lo; y <= y_hi + 1e-12; y += step) {
        const double pm2 = p_of(y - 2 * d), pm1 = p_of(y - d), p0 = p_of(y), pp1 = p_of(y + d), pp2 = p_of(y + 2 * d);
        const double dp = (pm2 - 8 * pm1 + 8 * pp1 - pp2) / (12 * d);
        const double ddp = (-pm2 + 16 * pm1 - 30 * p0 + 16 * pp1 - pp2) / (12 * d * d);
        r.max_pii_residual = std::max(r.max_pii_residual, std::abs(ddp - y * p0 - 2 * p0 * p0 * p0 + 0.5));
        r.max_riccati_defect = std::max(r.max_riccati_defect, std::abs(dp + p0 * p0 + 0.5 * y - U_of(y)));
        const double y_back = -x_of(y) / c;
        r.max_roundtrip_error = std::max(r.max_roundtrip_error, std::abs(y_back - y));
        ++r.points;
    }
    // Riccati p' = U - p^2 - y/2 integrated forward from the closed-form start value.
    double p = p_of(y_lo);
    const double hstep = 0.01;
    auto rhs = [&](double y, double pv) { return U_of(y) - pv * pv - 0.5 * y; };
    for (double y = y_lo; y < y_hi - 1e-12; y += hstep) {
        const double k1 = rhs(y, p), k2 = rhs(y + hstep / 2, p + hstep / 2 * k1);
        const double k3 = rhs(y + hstep / 2, p + hstep / 2 * k2), k4 = rhs(y + hstep, p + hstep * k3);
        p += hstep / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        r.max_riccati_drift = std::max(r.max_riccati_drift, std::abs(p - p_of(y + hstep)));
    }
    return r;
}

struct P34Refinement {
    std::vector<double> meshes;
    std::vector<double> diffs;  // max checkpoint change between successive meshes
    std::vector<double> ratios; // diffs[k+1]/diffs[k]
    double worst_ratio = 0.0;
};

// Successive mesh halvings, u compared at fixed checkpoints.
inline P34Refinement p34_refinement(double L_minus, double L_plus, double h0, int levels,
                                    const std::vector<double>& checkpoints = {-6.0, -3.0, -1.0, 0.0, 1.0, 3.0}) {
    P34Refinement r;
    std::vector<double> prev;
    for (int k = 0; k < levels; ++k) {
        const double h = h0 / std::pow(2.0, k);
        const P34Solution s = solve_p34(L_minus, L_plus, 1e-8, h);
        std::vector<double> cur;
        for (double y : checkpoints) cur.push_back(p34_u(s, y));
        if (!prev.empty()) {
            double d = 0.0;
            for (std::size_t i = 0; i < cur.size(); ++i) d = std::max(d, std::abs(cur[i] - prev[i]));
            r.diffs.push_back(d);
        }
        r.meshes.push_back(h);
        prev = cur;
    }
    for (std::size_t k = 1; k < r.diffs.size(); ++k) {
        r.ratios.push_back(r.diffs[k] / r.diffs[k - 1]);
        r.worst_ratio = std::max(r.worst_ratio, r.ratios.back());
    }
    return r;
}

} // namespace s6v
