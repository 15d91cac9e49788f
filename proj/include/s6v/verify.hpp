#pragma once

#include "s6v/dope.hpp"
#include "s6v/equilibrium.hpp"
#include "s6v/errors.hpp"
#include "s6v/painleve34.hpp"
#include "s6v/six_vertex.hpp"
#include "s6v/special.hpp"

#include <json.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace s6v {

using ojson = nlohmann::ordered_json;

struct CheckReport {
    std::string name;
    ojson inputs = ojson::object();
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;
    double tolerance = 0.0;
    bool use_abs = false; // compare abs_err instead of rel_err (rhs ~ 0)
    bool pass = false;
    double runtime = 0.0;
    ojson notes = ojson::object();

    void finish() {
        abs_err = std::abs(lhs - rhs);
        rel_err = rhs != 0.0 ? abs_err / std::abs(rhs) : (abs_err == 0.0 ? 0.0 : INFINITY);
        pass = (use_abs ? abs_err : rel_err) <= tolerance;
    }

    // Runtime is left out unless asked for; it is the only nondeterministic field.
    ojson to_json(bool with_runtime = false) const {
        ojson j;
        j["name"] = name;
        j["inputs"] = inputs;
        j["lhs"] = lhs;
        j["rhs"] = rhs;
        j["abs_err"] = abs_err;
        j["rel_err"] = rel_err;
        j["tolerance"] = tolerance;
        j["pass"] = pass;
        if (with_runtime) j["runtime"] = runtime;
        if (!notes.empty()) j["notes"] = notes;
        return j;
    }
};

namespace detail {

class Stopwatch {
  public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

  private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

inline double rel(double x, double y) { return y != 0.0 ? std::abs(x - y) / std::abs(y) : std::abs(x - y); }

} // namespace detail

// q-Laplace transform of the exact height against the Meixner multiplicative
// statistic with f(x) = zeta q^x and n = min(M,N), alpha = |N-M|, beta = kappa.
// Both placements of the height are tried: column M at row N, and column N at row M.
inline CheckReport check_bo_identity(double q, double u, int M, int N, double zeta, double tol = 1e-8) {
    detail::Stopwatch sw;
    CheckReport r;
    r.name = "bo_identity";
    r.inputs = {{"q", q}, {"u", u}, {"M", M}, {"N", N}, {"zeta", zeta}};
    r.tolerance = tol;
    if (M == N) throw ParameterOutOfRange("BO check needs M != N (alpha = |N-M| > 0)");
    const S6VParams p(q, u);
    const int n = std::min(M, N);
    const double alpha = std::abs(N - M);
    const DiscreteWeight w = meixner_weight(alpha, p.kappa, n);
    const OPBasis B = build_basis(w, n);
    const MultStatResult ms = multiplicative_statistic(w, B, n, [&](int x) { return zeta * std::pow(q, x); });
    const double trailing = std::exp(log_qpochhammer_inverse(q, zeta, 0, 1));
    const double trailing_from_0 = std::exp(log_qpochhammer_inverse(q, zeta, 0, 0));
    const double rhs = ms.value * trailing;
    r.rhs = rhs;
    r.notes["meixner"] = {{"n", n}, {"alpha", alpha}, {"beta", p.kappa}};
    r.notes["route_rel_diff"] = ms.rel_diff;
    double best = INFINITY;
    for (int ord = 0; ord < 2; ++ord) {
        const int col = ord == 0 ? M : N, row = ord == 0 ? N : M;
        const std::string key = ord == 0 ? "column_M_row_N" : "column_N_row_M";
        if (col > kMaxExactWidth) {
            r.notes[key] = "skipped: width exceeds exact enumeration cap";
            continue;
        }
        const HeightPmf pmf = exact_height_pmf(p, col, row);
        const double lhs = qlaplace_of_height(p, pmf, zeta, 1);
        const double e = detail::rel(lhs, rhs);
        r.notes[key] = {{"lhs", lhs}, {"rel_err", e}, {"rel_err_trailing_from_0", detail::rel(lhs, ms.value * trailing_from_0)}};
        if (e < best) {
            best = e;
            r.lhs = lhs;
            r.notes["matching_ordering"] = key;
        }
    }
    r.finish();
    r.runtime = sw.seconds();
    return r;
}

// log Z^sigma(s) - log Z^sigma(S) against the integral of the deformed one-point
// function along the deformation. The integrand is
//   sum_x e^{-t(x-aN)-u}/(1+e^{-t(x-aN)-u}) K^sigma(x,x|u) w^sigma(x|u),
// i.e. e^{-t(x-aN)-u} K^sigma(x,x|u) w(x). The variant with w(x) in place of
// w^sigma(x|u) is reported in the notes.
inline CheckReport check_deformation_formula(double alpha, double beta, int n, double s, double S, double t, double a,
                                             double N, double tol = 1e-6) {
    detail::Stopwatch sw;
    CheckReport r;
    r.name = "deformation_formula";
    r.inputs = {{"alpha", alpha}, {"beta", beta}, {"n", n}, {"s", s}, {"S", S}, {"t", t}, {"a", a}, {"N", N}};
    r.tolerance = tol;
    if (n > 6) throw ParameterOutOfRange("deformation check supports n <= 6");
    if (!(s <= S)) throw ParameterOutOfRange("need s <= S");
    const DiscreteWeight w = meixner_weight(alpha, beta, n);
    auto logZ = [&](double v) { return log_partition_function(build_basis(deformed_weight(w, t, v, a, N), n), n); };
    r.lhs = logZ(s) - logZ(S);

    auto integrand = [&](double v, bool variant) {
        const DiscreteWeight d = deformed_weight(w, t, v, a, N);
        const OPBasis B = build_basis(d, n);
        double acc = 0.0;
        for (int x = 1; x <= w.x_max(); ++x) {
            const double z = -t * (x - a * N) - v;
            const double occ = B.phi.col(x - 1).squaredNorm(); // K^sigma(x,x) w^sigma(x)
            const double g = logistic(z);
            acc += variant ? g * occ * std::exp(w.log_at(x) - d.log_at(x)) : g * occ;
        }
        return acc;
    };
    double err = 0.0, err_p = 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    if (S > s) {
        r.rhs = GK::integrate([&](double v) { return integrand(v, false); }, s, S, 15, 1e-13, &err);
        const double variant = GK::integrate([&](double v) { return integrand(v, true); }, s, S, 15, 1e-13, &err_p);
        r.notes["undeformed_weight_variant"] = {{"rhs", variant}, {"rel_err", detail::rel(r.lhs, variant)}};
    }
    r.notes["quadrature_error_estimate"] = err;
    if (err > std::max(1e-10, 1e-9 * std::abs(r.rhs)))
        throw QuadratureNotConverged("deformation integral error estimate " + std::to_string(err));
    if (S == s) r.use_abs = true;
    r.finish();
    r.runtime = sw.seconds();
    return r;
}

// sum_k e^{-tk+u}/(1+e^{-tk+u})^2, summed outward from the peak at k ~ u/t until
// the remaining geometric tail is below 1e-20.
inline double poisson_lattice_sum(double t, double u) {
    auto term = [&](long k) {
        const double e = std::exp(-std::abs(-t * static_cast<double>(k) + u));
        return e / ((1.0 + e) * (1.0 + e));
    };
    const long k0 = std::lround(u / t);
    double acc = term(k0);
    for (long d = 1;; ++d) {
        acc += term(k0 + d) + term(k0 - d);
        if (t * (d - 0.5) > 46.0) break;
    }
    return acc;
}

// 1/t + coef/t^2 sum_{k<=K} k cos(2 pi k u/t)/(e^{2 pi^2 k/t} - e^{-2 pi^2 k/t}).
inline double poisson_fourier_side(double t, double u, int K, double coef) {
    double acc = 0.0;
    for (int k = 1; k <= K; ++k) {
        const double e = 2.0 * kPi * kPi * k / t;
        if (e > 700) break;
        acc += k * std::cos(2.0 * kPi * k * u / t) / (2.0 * std::sinh(e));
    }
    return 1.0 / t + coef / (t * t) * acc;
}

// d^2/dz^2 log theta_4(z|q) from theta_4 = 1 + 2 sum (-1)^n q^{n^2} cos 2nz.
inline double log_theta4_second_derivative(double z, double q) {
    double th = 1.0, d1 = 0.0, d2 = 0.0;
    for (int k = 1; k < 400; ++k) {
        const double c = 2.0 * ((k & 1) ? -1.0 : 1.0) * std::pow(q, double(k) * k);
        if (std::abs(c) * 4.0 * k * k < 1e-20) break;
        th += c * std::cos(2.0 * k * z);
        d1 += -2.0 * k * c * std::sin(2.0 * k * z);
        d2 += -4.0 * k * k * c * std::cos(2.0 * k * z);
    }
    return (d2 * th - d1 * d1) / (th * th);
}

inline double poisson_theta_side(double t, double u, double coef) {
    return 1.0 / t + coef / (t * t) * log_theta4_second_derivative(kPi * u / t, std::exp(-2.0 * kPi * kPi / t));
}

// Lattice sum of the logistic density against its Fourier side (coefficient
// 8 pi^2) and the theta-function form (coefficient pi^2 on d^2 log theta_4).
// Variants with the coefficients 8 pi and pi are reported in the notes.
inline CheckReport check_poisson_summation(double t, double u, int K_terms = 200, double tol = 1e-12) {
    detail::Stopwatch sw;
    CheckReport r;
    r.name = "poisson_summation";
    r.inputs = {{"t", t}, {"u", u}, {"K_terms", K_terms}};
    r.tolerance = tol;
    if (!(t > 0)) throw ParameterOutOfRange("t must be > 0");
    r.lhs = poisson_lattice_sum(t, u);
    r.rhs = poisson_fourier_side(t, u, K_terms, 8.0 * kPi * kPi);
    const double theta = poisson_theta_side(t, u, kPi * kPi);
    r.finish();
    const double e_theta = detail::rel(r.lhs, theta);
    r.notes["theta_route"] = {{"value", theta}, {"rel_err", e_theta}};
    const double variant = poisson_fourier_side(t, u, K_terms, 8.0 * kPi);
    const double variant_theta = 1.0 / t + kPi / t * log_theta4_second_derivative(kPi * u / t, std::exp(-2.0 * kPi * kPi / t));
    r.notes["coefficient_8pi_variant"] = {{"value", variant}, {"rel_err", detail::rel(r.lhs, variant)}};
    r.notes["theta_pi_over_t_variant"] = {{"value", variant_theta}, {"rel_err", detail::rel(r.lhs, variant_theta)}};
    r.pass = r.pass && e_theta <= tol;
    r.runtime = sw.seconds();
    return r;
}

// S_N(S) against the explicit product over the sites kappa(S) = floor(N(a - S/(2tN)))
// for the Meixner ensemble alpha = (nu-1)N; a is the left band edge of the
// ensemble. S_N is evaluated as L_N times the deformation mass (hole determinant),
// with the partition-function ratio reported as a cross-check when it converges.
inline CheckReport check_apriori_product(double beta, double nu, double t, int N, double S) {
    detail::Stopwatch sw;
    CheckReport r;
    r.name = "apriori_product";
    r.inputs = {{"beta", beta}, {"nu", nu}, {"t", t}, {"N", N}, {"S", S}};
    if (N > 300) throw ParameterOutOfRange("apriori check supports N <= 300");
    const double a = ensemble_edges(beta, nu).a;
    const DiscreteWeight w = meixner_weight((nu - 1.0) * N, beta, N);
    const OPBasis B = build_basis(w, N);
    const double log_S = log_hole_determinant(B, w, t, S, a, N) + log_deformation_mass(t, S, a, N);
    const int kap = static_cast<int>(std::floor(N * (a - S / (2.0 * t * N))));
    double log_prod = 0.0;
    for (int x = 1; x <= kap; ++x) log_prod += softplus(-t * (x - N * (a - S / (N * t))));
    const double ratio = std::exp(log_S - log_prod);
    r.lhs = ratio;
    r.rhs = 1.0;
    r.tolerance = 1.0;
    r.finish();
    r.pass = ratio > 0.5 && ratio < 2.0;
    r.notes["a"] = a;
    r.notes["kappa_S"] = kap;
    r.notes["log_S"] = log_S;
    r.notes["log_product"] = log_prod;
    try {
        const DiscreteWeight d = deformed_weight(w, t, S, a, N);
        const double lz = log_partition_function(build_basis(d, N), N) - log_partition_function(B, N);
        r.notes["partition_ratio_log_S"] = lz;
    } catch (const Error& e) {
        r.notes["partition_ratio_log_S"] = std::string("unavailable: ") + e.what();
    }
    r.runtime = sw.seconds();
    return r;
}

enum class Regime { Upper, Critical, Lower };

inline Regime classify_regime(double h) { return h > 0.5 ? Regime::Upper : (h < -0.5 ? Regime::Lower : Regime::Critical); }

inline const char* regime_name(Regime g) {
    return g == Regime::Upper ? "upper" : (g == Regime::Lower ? "lower" : "critical");
}

// Shared Meixner side of the moderate-deviation comparison for one N.
struct MeixnerSide {
    S6VParams params;
    ScalingConstants sc;
    int N = 0;
    DiscreteWeight w;
    OPBasis B;
};

inline MeixnerSide meixner_side(double q, double u, double nu, int N) {
    MeixnerSide m{S6VParams(q, u), {}, N, {}, {}};
    m.sc = scaling_constants(m.params, nu);
    m.w = meixner_weight((nu - 1.0) * N, m.params.kappa, N);
    m.B = build_basis(m.w, N);
    return m;
}

// log E[prod_{i>=0} 1/(1+zeta q^{h+i})] with zeta = q^{-a N + h c N^{1/3}}, i.e. log L_N(s)
// at s = (h c N^{1/3} - 1) log(1/q); literal_sign flips the h term in zeta.
inline double md_log_qlaplace(const MeixnerSide& m, double h, bool literal_sign = false) {
    const double t = std::log(1.0 / m.params.q);
    const double n13 = std::cbrt(static_cast<double>(m.N));
    const double s = ((literal_sign ? -1.0 : 1.0) * h * m.sc.c * n13 - 1.0) * t;
    return log_hole_determinant(m.B, m.w, t, s, m.sc.a_eq, m.N);
}

// Argument sigma = s/(c t N^{1/3}) of the limiting predictions.
inline double md_sigma(const MeixnerSide& m, double h) { return h - 1.0 / (m.sc.c * std::cbrt(static_cast<double>(m.N))); }

inline CheckReport moderate_deviation_report(const MeixnerSide& m, double h, const P34Solution* p34 = nullptr,
                                             std::optional<Regime> expect = std::nullopt) {
    detail::Stopwatch sw;
    const Regime g = classify_regime(h);
    if (expect && *expect != g)
        throw RegimeMismatch("h=" + std::to_string(h) + " lies in the " + regime_name(g) + " regime");
    CheckReport r;
    r.name = std::string("moderate_deviation_") + regime_name(g);
    r.inputs = {{"q", m.params.q}, {"u", m.params.u}, {"nu", m.sc.nu}, {"N", m.N}, {"h", h}};
    r.lhs = md_log_qlaplace(m, h);
    const double sigma = md_sigma(m, h);
    r.notes["sigma"] = sigma;
    r.notes["airy_prediction"] = -airy_tail_integral(sigma);
    r.notes["cubic_prediction"] = -std::pow(std::abs(sigma), 3) / 12.0;
    if (g == Regime::Upper) {
        r.rhs = -airy_tail_integral(sigma);
        r.tolerance = 0.15;
    } else if (g == Regime::Lower) {
        r.rhs = -std::pow(std::abs(sigma), 3) / 12.0;
        r.tolerance = 0.25;
    } else {
        r.rhs = p34 ? -p34_tail_integral(*p34, sigma) : std::log(tracy_widom_gue(sigma));
        r.tolerance = INFINITY;
    }
    r.finish();
    if (g == Regime::Critical) r.pass = std::isfinite(r.lhs) && r.lhs < 0.0;
    r.notes["literal_sign_log_qlaplace"] = md_log_qlaplace(m, h, true);
    r.runtime = sw.seconds();
    return r;
}

inline std::vector<CheckReport> check_moderate_deviation(double q, double u, double nu, int N,
                                                         const std::vector<double>& h_list) {
    if (N > 400) throw ParameterOutOfRange("moderate-deviation check supports N <= 400");
    const MeixnerSide m = meixner_side(q, u, nu, N);
    std::optional<P34Solution> p34;
    std::vector<CheckReport> out;
    for (double h : h_list) {
        if (classify_regime(h) == Regime::Critical && !p34) p34 = solve_p34(16.0, 10.0);
        out.push_back(moderate_deviation_report(m, h, p34 ? &*p34 : nullptr));
    }
    return out;
}

// Kolmogorov-Smirnov distance of a sample to a continuous CDF, accounting for ties.
inline double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        const double F = cdf(xs[i]);
        d = std::max({d, std::abs(static_cast<double>(i) / n - F), std::abs(static_cast<double>(j) / n - F)});
        i = j;
    }
    return d;
}

struct TwSample {
    std::vector<int> heights;
    std::vector<double> values; // -(rescaled height)
};

inline TwSample tw_sample(double q, double u, double nu, int N, std::size_t samples, std::uint64_t seed,
                          unsigned threads) {
    const S6VParams p(q, u);
    const ScalingConstants sc = scaling_constants(p, nu);
    const int M = static_cast<int>(std::floor(nu * N));
    TwSample t;
    t.heights = sample_heights(p, M, N, samples, seed, threads);
    for (int h : t.heights) t.values.push_back(-rescaled_height(sc, N, h));
    return t;
}

// KS distance between -(h(nu N, N) - a N)/(c N^{1/3}) and F_GUE for a drawn sample.
inline CheckReport tw_clt_report(const TwSample& t, double tol = 0.08) {
    CheckReport r;
    r.name = "tw_clt";
    std::map<double, double> cache;
    auto F = [&](double x) {
        auto it = cache.find(x);
        if (it != cache.end()) return it->second;
        const double v = tracy_widom_gue(x);
        cache.emplace(x, v);
        return v;
    };
    r.lhs = ks_distance(t.values, F);
    r.rhs = 0.0;
    r.use_abs = true;
    r.tolerance = tol;
    r.finish();
    double mean = 0.0;
    for (double v : t.values) mean += v;
    r.notes["mean"] = mean / static_cast<double>(t.values.size());
    r.notes["distinct_values"] = cache.size();
    return r;
}

inline CheckReport check_tw_clt(double q, double u, double nu, int N, std::size_t samples, std::uint64_t seed,
                                unsigned threads, double tol = 0.08) {
    detail::Stopwatch sw;
    if (N > 1024) throw ParameterOutOfRange("TW check supports N <= 1024");
    CheckReport r = tw_clt_report(tw_sample(q, u, nu, N, samples, seed, threads), tol);
    r.inputs = {{"q", q}, {"u", u}, {"nu", nu}, {"N", N}, {"samples", samples}, {"seed", seed}};
    r.runtime = sw.seconds();
    return r;
}

} // namespace s6v
