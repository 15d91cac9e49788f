#pragma once

#include "s6v/errors.hpp"
#include "s6v/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

namespace s6v {

// Stochastic six-vertex parameters. Vertex inputs are written (i1, j1) with i
// the vertical edge entering from below and j the horizontal edge entering from
// the left.
//   b2 = P(vertical path continues up | only a vertical input)
//   b1 = P(horizontal path continues right | only a horizontal input)
struct S6VParams {
    double q = 0.0;
    double u = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double kappa = 0.0;

    S6VParams() = default;
    S6VParams(double q_, double u_) : q(q_), u(u_) {
        if (!(q > 0.0 && q < 1.0))
            throw ParameterOutOfRange("q must lie in (0,1), got " + std::to_string(q));
        if (!(u > 1.0 / std::sqrt(q)))
            throw ParameterOutOfRange("u must exceed q^{-1/2}, got " + std::to_string(u));
        const double sq = std::sqrt(q);
        const double den = u / sq - 1.0;
        b1 = (u / sq - 1.0 / q) / den;
        b2 = (u * sq - 1.0) / den;
        kappa = 1.0 / (sq * u);
    }
};

struct VertexOutcome {
    int i2 = 0;
    int j2 = 0;
    double prob = 0.0;
};

struct VertexDistribution {
    std::array<VertexOutcome, 2> outcomes{};
    int size = 0;
};

inline VertexDistribution vertex_transition(const S6VParams& p, int i1, int j1) {
    VertexDistribution d;
    if (i1 == j1) {
        d.outcomes[0] = {i1, j1, 1.0};
        d.size = 1;
    } else if (i1 == 1) {
        d.outcomes[0] = {1, 0, p.b2};
        d.outcomes[1] = {0, 1, 1.0 - p.b2};
        d.size = 2;
    } else {
        d.outcomes[0] = {0, 1, p.b1};
        d.outcomes[1] = {1, 0, 1.0 - p.b1};
        d.size = 2;
    }
    return d;
}

// h(M,N): number of paths that have crossed into column >= M by row N, i.e.
// horizontal crossings from column M-1 to column M summed over rows 1..N.
inline int sample_height(const S6VParams& p, int M, int N, std::uint64_t seed,
                         std::uint64_t replica = 0) {
    if (M < 1) throw ParameterOutOfRange("M must be >= 1");
    if (N <= 0) return 0;
    if (M == 1) return N;
    const int width = M - 1;
    CounterRng rng(seed, replica);
    const std::uint64_t stay_up = CounterRng::threshold(p.b2);
    const std::uint64_t stay_right = CounterRng::threshold(p.b1);
    std::vector<std::uint8_t> up(static_cast<std::size_t>(width), 0);
    int reach = -1; // rightmost column holding a vertical path
    int h = 0;
    for (int row = 0; row < N; ++row) {
        int carry = 1;
        int col = 0;
        for (; col < width; ++col) {
            if (!carry && col > reach) break;
            const int v = up[static_cast<std::size_t>(col)];
            if (v == carry) continue;
            if (v) {
                if (rng.next() >= stay_up) {
                    up[static_cast<std::size_t>(col)] = 0;
                    carry = 1;
                }
            } else if (rng.next() >= stay_right) {
                up[static_cast<std::size_t>(col)] = 1;
                carry = 0;
                reach = std::max(reach, col);
            }
        }
        h += carry;
    }
    return h;
}

// Independent replicas r = 0..samples-1, each on its own counter stream, so the
// result does not depend on the thread count.
inline std::vector<int> sample_heights(const S6VParams& p, int M, int N, std::size_t samples,
                                       std::uint64_t seed, unsigned threads = 1) {
    std::vector<int> out(samples);
    threads = std::max(1u, threads);
    auto work = [&](unsigned tid) {
        for (std::size_t r = tid; r < samples; r += threads) out[r] = sample_height(p, M, N, seed, r);
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    return out;
}

struct HeightPmf {
    int M = 0;
    int N = 0;
    std::vector<int> support;
    std::vector<double> probs;

    double total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }
    double prob(int h) const {
        for (std::size_t k = 0; k < support.size(); ++k)
            if (support[k] == h) return probs[k];
        return 0.0;
    }
};

inline constexpr int kMaxExactWidth = 16;

// Transfer-matrix enumeration over the vertical occupancy of columns 1..M-1,
// sweeping one vertex at a time.
inline HeightPmf exact_height_pmf(const S6VParams& p, int M, int N) {
    if (M > kMaxExactWidth)
        throw WidthTooLarge("exact enumeration supports M <= 16, got " + std::to_string(M));
    if (M < 1 || N < 0) throw ParameterOutOfRange("need M >= 1 and N >= 0");
    HeightPmf pmf;
    pmf.M = M;
    pmf.N = N;
    if (M == 1 || N == 0) {
        pmf.support = {M == 1 ? N : 0};
        pmf.probs = {1.0};
        return pmf;
    }
    const int width = M - 1;
    const std::size_t states = std::size_t{1} << width;
    const std::size_t H = static_cast<std::size_t>(N) + 1;
    // dist[(state * 2 + carry) * H + h]
    std::vector<double> cur(states * 2 * H, 0.0), nxt(states * 2 * H, 0.0);
    std::vector<double> rowdist(states * H, 0.0);
    rowdist[0] = 1.0;
    auto at = [H](std::size_t s, int c, std::size_t h) { return (s * 2 + static_cast<std::size_t>(c)) * H + h; };
    for (int row = 0; row < N; ++row) {
        std::fill(cur.begin(), cur.end(), 0.0);
        for (std::size_t s = 0; s < states; ++s)
            for (std::size_t h = 0; h < H; ++h) cur[at(s, 1, h)] = rowdist[s * H + h];
        for (int col = 0; col < width; ++col) {
            std::fill(nxt.begin(), nxt.end(), 0.0);
            const std::size_t bit = std::size_t{1} << col;
            for (std::size_t s = 0; s < states; ++s) {
                const int v = (s & bit) ? 1 : 0;
                for (int c = 0; c < 2; ++c) {
                    const VertexDistribution d = vertex_transition(p, v, c);
                    const double* src = &cur[at(s, c, 0)];
                    for (int k = 0; k < d.size; ++k) {
                        const auto& o = d.outcomes[static_cast<std::size_t>(k)];
                        const std::size_t s2 = o.i2 ? (s | bit) : (s & ~bit);
                        double* dst = &nxt[at(s2, o.j2, 0)];
                        for (std::size_t h = 0; h < H; ++h) dst[h] += o.prob * src[h];
                    }
                }
            }
            std::swap(cur, nxt);
        }
        std::fill(rowdist.begin(), rowdist.end(), 0.0);
        for (std::size_t s = 0; s < states; ++s)
            for (std::size_t h = 0; h < H; ++h) {
                rowdist[s * H + h] += cur[at(s, 0, h)];
                if (h + 1 < H) rowdist[s * H + h + 1] += cur[at(s, 1, h)];
            }
    }
    std::vector<double> byh(H, 0.0);
    for (std::size_t s = 0; s < states; ++s)
        for (std::size_t h = 0; h < H; ++h) byh[h] += rowdist[s * H + h];
    for (std::size_t h = 0; h < H; ++h)
        if (byh[h] > 0.0) {
            pmf.support.push_back(static_cast<int>(h));
            pmf.probs.push_back(byh[h]);
        }
    return pmf;
}

inline HeightPmf empirical_pmf(int M, int N, const std::vector<int>& samples) {
    HeightPmf pmf;
    pmf.M = M;
    pmf.N = N;
    if (samples.empty()) return pmf;
    const int hi = *std::max_element(samples.begin(), samples.end());
    std::vector<std::size_t> count(static_cast<std::size_t>(hi) + 1, 0);
    for (int h : samples) ++count[static_cast<std::size_t>(h)];
    for (int h = 0; h <= hi; ++h)
        if (count[static_cast<std::size_t>(h)]) {
            pmf.support.push_back(h);
            pmf.probs.push_back(static_cast<double>(count[static_cast<std::size_t>(h)]) /
                                static_cast<double>(samples.size()));
        }
    return pmf;
}

// log prod_{i >= first} 1/(1 + zeta q^{h+i}), truncated once the geometric
// remainder zeta q^{h+K+1}/(1-q) drops below tol.
inline double log_qpochhammer_inverse(double q, double zeta, double h, int first = 1, double tol = 1e-16) {
    if (zeta == 0.0) return 0.0;
    double acc = 0.0;
    for (int i = first;; ++i) {
        const double term = zeta * std::pow(q, h + i);
        acc -= std::log1p(term);
        if (zeta * std::pow(q, h + i + 1) / (1.0 - q) <= tol) break;
    }
    return acc;
}

// E[prod_{i >= first} 1/(1 + zeta q^{h+i})] under pmf.
inline double qlaplace_of_height(const S6VParams& p, const HeightPmf& pmf, double zeta, int first = 1) {
    if (zeta < 0.0) throw ParameterOutOfRange("zeta must be >= 0");
    double acc = 0.0;
    for (std::size_t k = 0; k < pmf.support.size(); ++k)
        acc += pmf.probs[k] * std::exp(log_qpochhammer_inverse(p.q, zeta, pmf.support[k], first));
    return acc;
}

struct ScalingConstants {
    double nu = 0.0;
    double kappa = 0.0;
    double a_eq = 0.0;
    double c = 0.0;
};

// (a_eq, c) as functions of (nu, kappa) alone.
inline ScalingConstants scaling_constants(double nu, double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw ParameterOutOfRange("kappa must lie in (0,1)");
    if (!(nu > 1.0 && nu * kappa < 1.0))
        throw SlopeOutOfLiquidRegion("nu must lie in (1, 1/kappa), got " + std::to_string(nu));
    const double r = std::sqrt(nu * kappa);
    ScalingConstants sc;
    sc.nu = nu;
    sc.kappa = kappa;
    sc.a_eq = (1.0 - r) * (1.0 - r) / (1.0 - kappa);
    sc.c = std::sqrt(kappa) * std::pow(nu, -1.0 / 6.0) / (1.0 - kappa) *
           std::pow((1.0 - r) * (std::sqrt(nu / kappa) - 1.0), 2.0 / 3.0);
    return sc;
}

inline ScalingConstants scaling_constants(const S6VParams& p, double nu) {
    const double hi = std::sqrt(p.q) * p.u;
    if (!(nu > 1.0 && nu < hi))
        throw SlopeOutOfLiquidRegion("nu must lie in (1, q^{1/2}u) = (1, " + std::to_string(hi) + "), got " +
                                     std::to_string(nu));
    return scaling_constants(nu, p.kappa);
}

inline double rescaled_height(const ScalingConstants& sc, int N, double h) {
    if (N < 1) throw ParameterOutOfRange("N must be >= 1");
    return (h - sc.a_eq * N) / (sc.c * std::cbrt(static_cast<double>(N)));
}

enum class Tail { Upper, Lower };

struct TailBounds {
    double lower = 0.0; // lower bound on P(H >= (1-eps)h)   resp. P(H <= -(1-eps)h)
    double upper = 0.0; // upper bound on P(H >= (1+eps)h)   resp. P(H <= -(1+eps)h)
    double multiplicative_factor = 1.0;
    double additive_term = 0.0;
};

// Comparison bounds between tail probabilities of the rescaled height and the
// q-Laplace transform, with the explicit correction terms
//   exp(q^{eps h N^{1/3}}/(1-q))   and   exp(-1/2 log(1/q) (eps h c)^2 N^{2/3}).
inline TailBounds tail_bounds_from_qlaplace(const ScalingConstants& sc, double q, int N, double h, double eps,
                                            double qlaplace_value, Tail tail) {
    if (!(h > 0.0)) throw ParameterOutOfRange("h must be > 0");
    if (!(eps > 0.0 && eps < 1.0)) throw ParameterOutOfRange("eps must lie in (0,1)");
    const double n13 = std::cbrt(static_cast<double>(N));
    TailBounds tb;
    tb.multiplicative_factor = std::exp(std::pow(q, eps * h * n13) / (1.0 - q));
    tb.additive_term = std::exp(-0.5 * std::log(1.0 / q) * std::pow(eps * h * sc.c, 2) * n13 * n13);
    if (tail == Tail::Upper) {
        tb.upper = tb.multiplicative_factor * qlaplace_value;
        tb.lower = qlaplace_value - tb.additive_term;
    } else {
        tb.lower = 1.0 - qlaplace_value + tb.additive_term;
        tb.upper = 1.0 - tb.multiplicative_factor * qlaplace_value;
    }
    return tb;
}

} // namespace s6v
