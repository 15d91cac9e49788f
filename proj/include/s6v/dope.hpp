#pragma once

#include "s6v/errors.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace s6v {

inline double log_add_exp(double a, double b) {
    if (a == -INFINITY) return b;
    if (b == -INFINITY) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Weight on sites x = 1..x_max stored as log w(x) at index x-1.
struct DiscreteWeight {
    std::vector<double> log_w;
    double tail_bound = 0.0; // neglected (moment-weighted) mass relative to the retained mass

    int x_max() const { return static_cast<int>(log_w.size()); }
    double log_at(int x) const { return log_w[static_cast<std::size_t>(x - 1)]; }
    double at(int x) const { return std::exp(log_at(x)); }
    double log_mass() const {
        double acc = -INFINITY;
        for (double v : log_w) acc = log_add_exp(acc, v);
        return acc;
    }
};

// Meixner weight Gamma(a+x-1)/(Gamma(a)Gamma(x)) b^{x-1} on x >= 1, evaluated
// through w(x+1)/w(x) = b(a+x-1)/x. The window is grown until the neglected
// mass and the neglected x^{2 degree}-weighted mass are both below 1e-16 of
// the retained ones, and it always covers the region where a degree-sized
// ensemble can live (the largest particle sits near
// degree (1 + sqrt(b(1 + a/degree)))^2/(1-b)).
inline DiscreteWeight meixner_weight(double alpha, double beta, int degree = 1) {
    if (!(alpha > 0.0)) throw ParameterOutOfRange("Meixner alpha must be > 0");
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterOutOfRange("Meixner beta must lie in (0,1)");
    const double p = 2.0 * std::max(degree, 1);
    const double tol = std::log(1e-17);
    DiscreteWeight w;
    double lw = 0.0;
    double mass = -INFINITY, moment = -INFINITY;
    const double nd = std::max(degree, 1);
    const double edge = nd * std::pow(1.0 + std::sqrt(beta * (1.0 + alpha / nd)), 2) / (1.0 - beta);
    const int min_sites = static_cast<int>(std::ceil(1.25 * edge + 12.0 * std::cbrt(nd) + 40.0));
    for (int x = 1;; ++x) {
        w.log_w.push_back(lw);
        mass = log_add_exp(mass, lw);
        moment = log_add_exp(moment, lw + p * std::log(x));
        const double rw = beta * (alpha + x - 1.0) / x;
        const double lw_next = lw + std::log(rw);
        const double rbound = std::max(beta * (alpha + x) / (x + 1.0), beta);
        const double rm = rbound * std::pow((x + 2.0) / (x + 1.0), p);
        if (rm < 1.0 && x >= min_sites) {
            const double tail_m = lw_next + p * std::log(x + 1.0) - std::log1p(-rm) - moment;
            const double tail_w = lw_next - std::log1p(-rbound) - mass;
            if (tail_m < tol && tail_w < tol) {
                w.tail_bound = std::exp(std::max(tail_m, tail_w));
                break;
            }
        }
        if (x > 20000000) throw ParameterOutOfRange("Meixner weight window exceeds 2e7 sites");
        lw = lw_next;
    }
    return w;
}

// (1 + exp(-t(x - aN) - s)) w(x).
inline DiscreteWeight deformed_weight(const DiscreteWeight& w, double t, double s, double a, double N) {
    if (!(t > 0.0)) throw ParameterOutOfRange("t must be > 0");
    DiscreteWeight d = w;
    for (int x = 1; x <= w.x_max(); ++x)
        d.log_w[static_cast<std::size_t>(x - 1)] += softplus(-t * (x - a * N) - s);
    d.tail_bound = w.tail_bound * (1.0 + std::exp(-t * (w.x_max() - a * N) - s));
    return d;
}

// Monic recurrence p_{k+1}(x) = (x - a_k) p_k(x) - b_k p_{k-1}(x), norms
// gamma_k^{-2} = sum_x p_k(x)^2 w(x), and the orthonormal functions
// phi_k(x) = gamma_k p_k(x) sqrt(w(x)) on the weight window (row k, column x-1).
struct OPBasis {
    int n = 0;
    std::vector<double> a;
    std::vector<double> b; // b[0] = 0
    std::vector<double> log_gamma_inv2;
    Eigen::MatrixXd phi;
    double residual = 0.0; // max_{j,k} |<phi_j, phi_k> - delta_jk|
    int digits = 0;        // working precision that met the tolerance
    bool reorthogonalized = false;
};

namespace detail {

// With reorthogonalize the residual vector at each step is projected against
// all previous orthonormal functions (twice), which keeps the procedure stable
// for weights with a saturated region.
template <class Real>
OPBasis stieltjes(const std::vector<double>& log_w, int n, bool reorthogonalize) {
    using std::exp;
    using std::log;
    using std::sqrt;
    const std::size_t X = log_w.size();
    const double shift = *std::max_element(log_w.begin(), log_w.end());
    std::vector<Real> v(X), vp(X, Real(0)), r(X);
    std::vector<std::vector<Real>> Q;
    Real norm2 = 0;
    for (std::size_t i = 0; i < X; ++i) {
        v[i] = exp(Real(0.5 * (log_w[i] - shift)));
        norm2 += v[i] * v[i];
    }
    OPBasis B;
    B.n = n;
    B.a.assign(static_cast<std::size_t>(n), 0.0);
    B.b.assign(static_cast<std::size_t>(n), 0.0);
    B.log_gamma_inv2.assign(static_cast<std::size_t>(n), 0.0);
    B.phi.resize(n, static_cast<Eigen::Index>(X));
    const Real nrm = sqrt(norm2);
    for (auto& e : v) e /= nrm;
    Real lg = Real(shift) + log(norm2);
    Real bprev = 0;
    for (int k = 0; k < n; ++k) {
        B.log_gamma_inv2[static_cast<std::size_t>(k)] = static_cast<double>(lg);
        for (std::size_t i = 0; i < X; ++i) B.phi(k, static_cast<Eigen::Index>(i)) = static_cast<double>(v[i]);
        Real ak = 0;
        for (std::size_t i = 0; i < X; ++i) ak += Real(static_cast<double>(i + 1)) * v[i] * v[i];
        B.a[static_cast<std::size_t>(k)] = static_cast<double>(ak);
        if (k + 1 == n) break;
        for (std::size_t i = 0; i < X; ++i) r[i] = (Real(static_cast<double>(i + 1)) - ak) * v[i] - bprev * vp[i];
        if (reorthogonalize) {
            Q.push_back(v);
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& qj : Q) {
                    Real dot = 0;
                    for (std::size_t i = 0; i < X; ++i) dot += qj[i] * r[i];
                    for (std::size_t i = 0; i < X; ++i) r[i] -= dot * qj[i];
                }
        }
        Real rn = 0;
        for (std::size_t i = 0; i < X; ++i) rn += r[i] * r[i];
        const Real beta = sqrt(rn);
        if (!(beta > 0)) throw DegenerateWeight("recurrence terminated at degree " + std::to_string(k + 1));
        B.b[static_cast<std::size_t>(k + 1)] = static_cast<double>(rn);
        lg += log(rn);
        for (std::size_t i = 0; i < X; ++i) {
            vp[i] = v[i];
            v[i] = r[i] / beta;
        }
        bprev = beta;
    }
    const Eigen::MatrixXd G = B.phi * B.phi.transpose() - Eigen::MatrixXd::Identity(n, n);
    B.residual = G.cwiseAbs().maxCoeff();
    return B;
}

} // namespace detail

using Float50 = boost::multiprecision::cpp_bin_float_50;

// Stieltjes procedure in double first; while the orthogonality residual exceeds
// tol, retry with full reorthogonalisation in double and then in 50 digits.
inline OPBasis build_basis(const DiscreteWeight& w, int n, double tol = 1e-10) {
    if (n < 1) throw ParameterOutOfRange("basis degree must be >= 1");
    const auto positive = std::count_if(w.log_w.begin(), w.log_w.end(), [](double v) { return v > -INFINITY; });
    if (positive < n)
        throw DegenerateWeight("weight has " + std::to_string(positive) + " support points, need " +
                               std::to_string(n));
    auto accept = [&](OPBasis& B) {
        if (B.residual > tol) return false;
        const double edge_mass = B.phi.col(B.phi.cols() - 1).squaredNorm();
        if (edge_mass > 1e-16)
            throw DomainTooSmall("kernel diagonal at the last retained site is " + std::to_string(edge_mass));
        return true;
    };
    OPBasis B = detail::stieltjes<double>(w.log_w, n, false);
    B.digits = 16;
    if (accept(B)) return B;
    B = detail::stieltjes<double>(w.log_w, n, true);
    B.digits = 16;
    B.reorthogonalized = true;
    if (accept(B)) return B;
    B = detail::stieltjes<Float50>(w.log_w, n, true);
    B.digits = 50;
    B.reorthogonalized = true;
    if (accept(B)) return B;
    throw PrecisionExhausted("orthogonality residual " + std::to_string(B.residual) + " at 50 digits");
}

// Evaluate the monic polynomials p_0..p_{n-1} at a point from the recurrence.
inline std::vector<double> monic_values(const OPBasis& B, double x) {
    std::vector<double> p(static_cast<std::size_t>(B.n));
    p[0] = 1.0;
    if (B.n > 1) p[1] = x - B.a[0];
    for (int k = 1; k + 1 < B.n; ++k)
        p[static_cast<std::size_t>(k + 1)] = (x - B.a[static_cast<std::size_t>(k)]) * p[static_cast<std::size_t>(k)] -
                                             B.b[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(k - 1)];
    return p;
}

// Kernel on a window of sites. kt holds the symmetrised kernel
// sqrt(w(x)) K_n(x,y) sqrt(w(y)); K_n itself is recovered by dividing out the weight.
struct KernelMatrix {
    int n = 0;
    std::vector<int> window;
    std::vector<double> log_w;
    Eigen::MatrixXd kt;

    std::size_t size() const { return window.size(); }
    double K(std::size_t i, std::size_t j) const { return kt(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * std::exp(-0.5 * (log_w[i] + log_w[j])); }
    double one_point(std::size_t i) const { return kt(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)); }
    double weight(std::size_t i) const { return std::exp(log_w[i]); }
};

inline std::vector<int> site_range(int lo, int hi) {
    std::vector<int> s;
    for (int x = lo; x <= hi; ++x) s.push_back(x);
    return s;
}

inline KernelMatrix cd_kernel(const OPBasis& B, const DiscreteWeight& w, const std::vector<int>& window) {
    KernelMatrix K;
    K.n = B.n;
    K.window = window;
    Eigen::MatrixXd cols(B.n, static_cast<Eigen::Index>(window.size()));
    for (std::size_t j = 0; j < window.size(); ++j) {
        const int x = window[j];
        if (x < 1 || x > w.x_max()) throw OutOfRange("kernel site " + std::to_string(x) + " outside weight window");
        cols.col(static_cast<Eigen::Index>(j)) = B.phi.col(x - 1);
        K.log_w.push_back(w.log_at(x));
    }
    K.kt = cols.transpose() * cols;
    return K;
}

inline double log_partition_function(const OPBasis& B, int n) {
    if (n > B.n) throw ParameterOutOfRange("basis degree smaller than n");
    double acc = std::lgamma(n + 1.0);
    for (int k = 0; k < n; ++k) acc += B.log_gamma_inv2[static_cast<std::size_t>(k)];
    return acc;
}

struct LogDet {
    double log_abs = 0.0;
    int sign = 1;
};

inline LogDet log_det(const Eigen::MatrixXd& A) {
    LogDet d;
    if (A.rows() == 0) return d;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::MatrixXd& U = lu.matrixLU();
    d.sign = static_cast<int>(lu.permutationP().determinant());
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
        const double u = U(i, i);
        if (u == 0.0) {
            d.log_abs = -INFINITY;
            return d;
        }
        if (u < 0) d.sign = -d.sign;
        d.log_abs += std::log(std::abs(u));
    }
    return d;
}

// Largest site x <= x_max with |f(x)| above the cutoff; the determinant window is 1..that.
inline int significant_extent(const DiscreteWeight& w, const std::function<double(int)>& f, double cutoff = 1e-20) {
    int last = 0;
    for (int x = 1; x <= w.x_max(); ++x)
        if (std::abs(f(x)) > cutoff) last = x;
    return last;
}

struct MultStatResult {
    double value = 0.0;
    double log_value = 0.0;
    double log_ratio_route = 0.0; // log Z_n((1+f)w) - log Z_n(w)
    double log_det_route = 0.0;   // log det(I + K f)
    double rel_diff = 0.0;
    int window = 0;
};

// E[prod_{x in X}(1 + f(x))] by two independent routes that must agree.
inline MultStatResult multiplicative_statistic(const DiscreteWeight& w, const OPBasis& B, int n,
                                               const std::function<double(int)>& f, double tol = 1e-8) {
    MultStatResult r;
    DiscreteWeight d = w;
    for (int x = 1; x <= w.x_max(); ++x) {
        const double fx = f(x);
        if (!(fx > -1.0)) throw ParameterOutOfRange("f must exceed -1 on the support");
        d.log_w[static_cast<std::size_t>(x - 1)] += std::log1p(fx);
    }
    const OPBasis Bd = build_basis(d, n);
    r.log_ratio_route = log_partition_function(Bd, n) - log_partition_function(B, n);

    r.window = significant_extent(w, f);
    if (r.window == 0) {
        r.log_det_route = 0.0;
    } else {
        const KernelMatrix K = cd_kernel(B, w, site_range(1, r.window));
        Eigen::MatrixXd A = Eigen::MatrixXd::Identity(r.window, r.window);
        for (int j = 0; j < r.window; ++j) A.col(j) += K.kt.col(j) * f(j + 1);
        const LogDet ld = log_det(A);
        if (ld.sign <= 0) throw RoutesDisagree("determinant route produced a non-positive value");
        r.log_det_route = ld.log_abs;
    }
    r.log_value = r.log_det_route;
    r.value = std::exp(r.log_value);
    r.rel_diff = std::abs(std::expm1(r.log_ratio_route - r.log_det_route));
    if (!(r.rel_diff <= tol))
        throw RoutesDisagree("partition-function and determinant routes differ by " + std::to_string(r.rel_diff));
    return r;
}

inline MultStatResult multiplicative_statistic(const DiscreteWeight& w, int n, const std::function<double(int)>& f,
                                               double tol = 1e-8) {
    return multiplicative_statistic(w, build_basis(w, n), n, f, tol);
}

// sum_{x >= 1} log(1 + exp(-t(x - aN) - s)), summed past the weight window until
// the geometric remainder is below 1e-18.
inline double log_deformation_mass(double t, double s, double a, double N) {
    double acc = 0.0;
    for (int x = 1;; ++x) {
        const double z = -t * (x - a * N) - s;
        acc += softplus(z);
        if (z < -42.0 && std::exp(z) / (-std::expm1(-t)) < 1e-18) break;
    }
    return acc;
}

// log det(I - D (I - K)) with D = f/(1+f), the hole-process form of L_N.
inline double log_hole_determinant(const OPBasis& B, const DiscreteWeight& w, double t, double s, double a,
                                   double N) {
    int extent = 0;
    for (int x = 1; x <= w.x_max(); ++x)
        if (logistic(-t * (x - a * N) - s) > 1e-18) extent = x;
    if (extent == 0) return 0.0;
    if (extent == w.x_max()) throw OutOfRange("deformation does not decay inside the weight window");
    const KernelMatrix K = cd_kernel(B, w, site_range(1, extent));
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(extent, extent) - K.kt;
    for (int i = 0; i < extent; ++i) A.row(i) *= -logistic(-t * (i + 1 - a * N) - s);
    A += Eigen::MatrixXd::Identity(extent, extent);
    const LogDet ld = log_det(A);
    if (ld.sign <= 0) throw RoutesDisagree("hole determinant is not positive");
    return ld.log_abs;
}

struct HoleStatResult {
    double log_L = 0.0;      // log S - sum log(1 + e^{...})
    double log_S = 0.0;
    double log_mass = 0.0;
    double log_L_det = 0.0;  // hole-determinant route
};

inline HoleStatResult hole_statistic_L(const DiscreteWeight& w, const OPBasis& B, int n, double t, double s,
                                       double a, double N) {
    HoleStatResult r;
    auto f = [&](int x) { return std::exp(-t * (x - a * N) - s); };
    r.log_S = multiplicative_statistic(w, B, n, f, 1e-7).log_value;
    r.log_mass = log_deformation_mass(t, s, a, N);
    r.log_L = r.log_S - r.log_mass;
    r.log_L_det = log_hole_determinant(B, w, t, s, a, N);
    return r;
}

inline HoleStatResult hole_statistic_L(const DiscreteWeight& w, int n, double t, double s, double a, double N) {
    return hole_statistic_L(w, build_basis(w, n), n, t, s, a, N);
}

// E[exp(-v #(X cap [lo,hi]))] = det(I - (1 - e^{-v}) K) on the sites lo..hi.
inline double counting_mgf(const KernelMatrix& K, int lo, int hi, double v) {
    if (v < 0.0) throw ParameterOutOfRange("v must be >= 0");
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < K.size(); ++i)
        if (K.window[i] >= lo && K.window[i] <= hi) idx.push_back(static_cast<Eigen::Index>(i));
    if (static_cast<int>(idx.size()) != hi - lo + 1) throw OutOfRange("interval not contained in kernel window");
    const double c = -std::expm1(-v);
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) A(i, j) -= c * K.kt(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    const LogDet ld = log_det(A);
    return ld.sign * std::exp(ld.log_abs);
}

} // namespace s6v
