#pragma once

#include "s6v/dope.hpp"
#include "s6v/errors.hpp"
#include "s6v/six_vertex.hpp"
#include "s6v/special.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace s6v {

struct Endpoints {
    double a = 0.0, b = 0.0;
};

inline Endpoints endpoints(double beta, double nu) {
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterOutOfRange("beta must lie in (0,1)");
    if (!(nu > 1.0)) throw ParameterOutOfRange("nu must exceed 1");
    const double sb = std::sqrt(beta);
    return {(1.0 - sb) * (1.0 - sb) * (nu - 1.0) / (1.0 - beta), (1.0 + sb) * (1.0 + sb) * (nu - 1.0) / (1.0 - beta)};
}

// Edges of the support of the rescaled one-point function of the Meixner
// ensemble with alpha = (nu-1)n, (1 -+ sqrt(nu beta))^2/(1-beta).
inline Endpoints ensemble_edges(double beta, double nu) {
    const double r = std::sqrt(nu * beta);
    return {(1.0 - r) * (1.0 - r) / (1.0 - beta), (1.0 + r) * (1.0 + r) / (1.0 - beta)};
}

struct EquilibriumMeasure {
    double beta = 0.0, nu = 0.0;
    double a = 0.0, b = 0.0;
    std::shared_ptr<std::atomic<long>> clamp_events = std::make_shared<std::atomic<long>>(0);

    long clamps() const { return clamp_events->load(); }
};

inline EquilibriumMeasure make_equilibrium(double beta, double nu) {
    const Endpoints e = endpoints(beta, nu);
    EquilibriumMeasure m;
    m.beta = beta;
    m.nu = nu;
    m.a = e.a;
    m.b = e.b;
    return m;
}

inline double band_density_argument(const EquilibriumMeasure& m, double x) {
    return (x * (1.0 - m.beta) - (m.nu - 1.0) * (1.0 + m.beta)) / (2.0 * std::sqrt(m.beta * (m.nu - 1.0) * x));
}

// arccos band formula on (a,b), argument clamped to [-1,1]; every clamp is counted.
inline double band_density_closed_form(const EquilibriumMeasure& m, double x) {
    double arg = band_density_argument(m, x);
    if (arg < -1.0 || arg > 1.0) {
        m.clamp_events->fetch_add(1);
        arg = std::clamp(arg, -1.0, 1.0);
    }
    return std::acos(arg) / kPi;
}

// 1 on (0,a), the band formula on [a,b], 0 beyond.
inline double density(const EquilibriumMeasure& m, double x) {
    if (x <= 0.0) return 0.0;
    if (x < m.a) return 1.0;
    if (x > m.b) return 0.0;
    return band_density_closed_form(m, x);
}

inline double total_mass(const EquilibriumMeasure& m) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return m.a + ts.integrate([&](double x) { return band_density_closed_form(m, x); }, m.a, m.b);
}

inline double external_field(double beta, double nu, double x) {
    if (!(x > 0.0)) throw ParameterOutOfRange("external field needs x > 0");
    return x * std::log(x / (beta * (nu + x - 1.0))) + (nu - 1.0) * std::log((nu - 1.0) / (nu + x - 1.0));
}

struct DensityProfile {
    int n = 0;
    double alpha = 0.0, beta = 0.0;
    std::vector<double> x;   // site / n
    std::vector<double> rho; // occupation probability K_n(site,site) w(site)

    // Linear interpolation in x; 1 left of the first site is not assumed, the end values are held.
    double operator()(double t) const {
        if (t <= x.front()) return rho.front();
        if (t >= x.back()) return rho.back();
        const auto it = std::upper_bound(x.begin(), x.end(), t);
        const std::size_t j = static_cast<std::size_t>(it - x.begin());
        const double f = (t - x[j - 1]) / (x[j] - x[j - 1]);
        return (1.0 - f) * rho[j - 1] + f * rho[j];
    }
};

// One-point function of the Meixner ensemble with alpha = (nu-1)n, as a function of site/n.
inline DensityProfile empirical_density_oracle(double nu, double beta, int n) {
    if (n < 1 || n > 400) throw ParameterOutOfRange("empirical density oracle supports 1 <= n <= 400");
    DensityProfile p;
    p.n = n;
    p.alpha = (nu - 1.0) * n;
    p.beta = beta;
    const DiscreteWeight w = meixner_weight(p.alpha, beta, n);
    const OPBasis B = build_basis(w, n);
    for (int x = 1; x <= w.x_max(); ++x) {
        p.x.push_back(static_cast<double>(x) / n);
        p.rho.push_back(B.phi.col(x - 1).squaredNorm());
    }
    return p;
}

// The profile as a density of x: rho_k on ((k-1)/n, k/n], so its integral is n/n = 1.
inline std::function<double(double)> profile_step_density(const DensityProfile& p) {
    return [p](double x) {
        if (x <= 0.0) return 0.0;
        const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(x * p.n - 1e-9)));
        return k > p.rho.size() ? 0.0 : p.rho[k - 1];
    };
}

inline std::vector<double> profile_breaks(const DensityProfile& p) {
    std::vector<double> b{0.0};
    b.insert(b.end(), p.x.begin(), p.x.end());
    return b;
}

struct EulerLagrangeReport {
    double ell = 0.0;            // constant fixed by the band equality
    double mass = 0.0;
    std::vector<double> grid;
    std::vector<double> value;   // U(x) + V(x)/2 - ell, U the logarithmic potential
    double band_max_abs = 0.0;
    bool saturated_negative = true;
    bool gap_positive = true;
};

// Logarithmic potential U(x) = int log(1/|x-y|) rho(y) dy on [0, top], split at
// the breakpoints and at x; adaptive Gauss-Kronrod on each panel (the log
// singularity then sits at a panel end).
inline double log_potential(const std::function<double(double)>& rho, double x, std::vector<double> breaks,
                            double tol = 1e-12) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    breaks.push_back(x);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double lo = breaks[i], hi = breaks[i + 1];
        if (hi <= lo) continue;
        acc += GK::integrate([&](double y) {
            const double d = std::abs(x - y);
            return d > 0 ? -std::log(d) * rho(y) : 0.0;
        }, lo, hi, 12, tol);
    }
    return acc;
}

// Sign pattern of U + V/2 - ell: negative on the saturated region, zero on the
// band, positive in the gap. ell is the mean over band-interior grid points.
inline EulerLagrangeReport euler_lagrange_diagnostic(const std::function<double(double)>& rho, double a, double b,
                                                     double beta, double nu, const std::vector<double>& grid,
                                                     std::vector<double> breaks, double mass_tol = 1e-3,
                                                     double quad_tol = 1e-12) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    EulerLagrangeReport r;
    std::vector<double> pts = breaks;
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        if (pts[i + 1] > pts[i]) r.mass += GK::integrate(rho, pts[i], pts[i + 1], 12, quad_tol);
    if (!(std::abs(r.mass - 1.0) <= mass_tol))
        throw MassInconsistent("density mass " + std::to_string(r.mass) + " differs from 1");
    r.grid = grid;
    double sum_band = 0.0;
    int n_band = 0;
    std::vector<double> raw;
    for (double x : grid) {
        const double v = log_potential(rho, x, breaks, quad_tol) + 0.5 * external_field(beta, nu, x);
        raw.push_back(v);
        if (x > a && x < b) {
            sum_band += v;
            ++n_band;
        }
    }
    if (n_band == 0) throw ParameterOutOfRange("grid has no band-interior points");
    r.ell = sum_band / n_band;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = raw[i] - r.ell;
        r.value.push_back(v);
        const double x = grid[i];
        if (x > a && x < b) r.band_max_abs = std::max(r.band_max_abs, std::abs(v));
        else if (x < a && !(v < 0)) r.saturated_negative = false;
        else if (x > b && !(v > 0)) r.gap_positive = false;
    }
    return r;
}

struct CvFit {
    double edge = 0.0;
    std::vector<double> eps;
    std::vector<double> exponent; // free-slope fit per window
    std::vector<double> c0;       // fixed slope 1/2 per window
    double exponent_extrapolated = 0.0;
    double c0_extrapolated = 0.0;
    double c_V = 0.0;
    double product_with_c = 0.0;
};

// Fits 1 - rho(x) ~ (c0/pi)(x - edge)^{1/2} by least squares of log(1-rho) against
// log(x-edge) over the sample points inside [edge+eps, edge+4eps], for each eps,
// then extrapolates linearly in eps to 0. c_V = c0^{2/3}.
inline CvFit c_v_constant(const DensityProfile& p, double edge, const ScalingConstants& sc,
                          const std::vector<double>& eps_list = {0.02, 0.01, 0.005}) {
    CvFit f;
    f.edge = edge;
    for (double eps : eps_list) {
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < p.x.size(); ++i) {
            const double x = p.x[i];
            if (x < edge + eps || x > edge + 4.0 * eps) continue;
            const double g = 1.0 - p.rho[i];
            if (!(g > 0.0)) continue;
            lx.push_back(std::log(x - edge));
            ly.push_back(std::log(g));
        }
        if (lx.size() < 2) throw FitFailed("fewer than two profile points in the fit window at eps=" + std::to_string(eps));
        const double n = static_cast<double>(lx.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        const double den = n * sxx - sx * sx;
        if (!(std::abs(den) > 0)) throw FitFailed("degenerate fit window");
        f.eps.push_back(eps);
        f.exponent.push_back((n * sxy - sx * sy) / den);
        f.c0.push_back(kPi * std::exp((sy - 0.5 * sx) / n));
    }
    auto extrapolate = [&](const std::vector<double>& v) {
        const double n = static_cast<double>(v.size());
        if (v.size() == 1) return v[0];
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            sx += f.eps[i];
            sy += v[i];
            sxx += f.eps[i] * f.eps[i];
            sxy += f.eps[i] * v[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        return (sy - slope * sx) / n;
    };
    f.exponent_extrapolated = extrapolate(f.exponent);
    f.c0_extrapolated = extrapolate(f.c0);
    if (!(f.c0_extrapolated > 0)) throw FitFailed("non-positive c0");
    f.c_V = std::pow(f.c0_extrapolated, 2.0 / 3.0);
    f.product_with_c = f.c_V * sc.c;
    return f;
}

} // namespace s6v
