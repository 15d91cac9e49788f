#include "catch_amalgamated.hpp"

#include "s6v/special.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace s6v;
using Catch::Approx;

TEST_CASE("Airy functions satisfy the Airy equation") {
    const double h = 1e-4;
    double worst = 0;
    for (double x = -6.0; x <= 6.0; x += 0.25) {
        const double d2 = (boost::math::airy_ai(x + h) - 2 * boost::math::airy_ai(x) + boost::math::airy_ai(x - h)) / (h * h);
        worst = std::max(worst, std::abs(d2 - x * airy(x).ai));
    }
    CHECK(worst <= 1e-7);
    CHECK(airy(0.0).ai == Approx(0.355028053887817239).epsilon(1e-15));
    CHECK(airy(0.0).ai_prime == Approx(-0.258819403792806798).epsilon(1e-15));
}

TEST_CASE("Airy kernel") {
    CHECK(airy_kernel(0.3, -1.2) == Approx(airy_kernel(-1.2, 0.3)).epsilon(1e-14));
    CHECK(airy_kernel(0.0, 0.0) == Approx(std::pow(airy(0.0).ai_prime, 2)).epsilon(1e-15));
    for (double x : {-3.0, 0.5, 2.0}) {
        CHECK(airy_kernel(x, x + 2e-6) == Approx(airy_kernel_diag(x)).epsilon(1e-5));
        CHECK(airy_kernel(x, x + 5e-7) == Approx(airy_kernel(x, x + 2e-6)).epsilon(1e-5));
    }
    const double r10 = airy_kernel_diag(10.0) * 8 * kPi * 10 * std::exp(4.0 / 3.0 * std::pow(10.0, 1.5));
    CHECK(r10 >= 0.95);
    CHECK(r10 <= 1.05);

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> U(-5.0, 5.0);
    std::vector<double> pts(40);
    for (double& p : pts) p = U(gen);
    Eigen::MatrixXd A(40, 40);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) A(i, j) = airy_kernel(pts[i], pts[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("Airy diagonal asymptotics") {
    CHECK_THROWS_AS(airy_diag_asymptotics(1.5), DomainTooSmall);
    CHECK_THROWS_AS(airy_diag_asymptotics(-1.9), DomainTooSmall);
    double prev = INFINITY;
    for (double x : {3.0, 6.0, 12.0, 20.0}) {
        const auto a = airy_diag_asymptotics(x);
        CHECK(a.pos_approx > 0);
        const double err = std::abs(airy_kernel_diag(x) / a.pos_approx - 1);
        CHECK(err < prev);
        prev = err;
    }
    const auto n25 = airy_diag_asymptotics(-25.0);
    CHECK(n25.neg_approx > 0);
    CHECK(std::abs(airy_kernel_diag(-25.0) / n25.neg_approx - 1) <= 0.02);
}

TEST_CASE("Airy diagonal tail integral") {
    double prev = INFINITY;
    for (double t = -8.0; t <= 8.0; t += 0.5) {
        const double v = airy_tail_integral(t);
        CHECK(v < prev);
        prev = v;
        CHECK(v == Approx(airy_tail_integral_closed(t)).epsilon(1e-9).margin(1e-300));
    }
    const double r6 = airy_tail_integral(6.0) / airy_tail_laplace(6.0);
    CHECK(std::abs(r6 - 1) <= 0.10);
    const double r30 = airy_tail_integral(-30.0) / (2.0 / (3.0 * kPi) * std::pow(30.0, 1.5));
    CHECK(std::abs(r30 - 1) <= 0.02);
}

TEST_CASE("Bessel kernel diagonal") {
    CHECK(std::abs(bessel_kernel_diag(0.0) - 0.25) <= 1e-12);
    const double d = 1e-3;
    const double slope = (bessel_kernel_diag(d) - bessel_kernel_diag(-d)) / (2 * d);
    CHECK(std::abs(slope + 1.0 / 16.0) <= 1e-4);
    CHECK(bessel_kernel_diag(1e-9) == Approx(bessel_kernel_diag(-1e-9)).epsilon(1e-9));
    CHECK(bessel_kernel_diag(-2e-8) == Approx(0.25 + 2e-8 / 16).epsilon(1e-14));
    CHECK(bessel_kernel_diag(-4.0) > bessel_kernel_diag(-1.0));
    const double r400 = bessel_kernel_diag(400.0) * 2 * kPi * 20.0;
    CHECK(std::abs(r400 - 1) <= 0.10);
}

TEST_CASE("Tracy-Widom tail references") {
    const TwTails t1 = tw_tail_reference(1.0);
    CHECK(t1.upper == Approx(std::exp(-2.0 / 3.0)).epsilon(1e-15));
    CHECK(t1.lower == Approx(std::exp(-1.0 / 12.0)).epsilon(1e-15));
    CHECK(std::log(tw_tail_reference(2.7).upper) / std::pow(2.7, 1.5) == Approx(-2.0 / 3.0).epsilon(1e-14));
    CHECK(tw_tail_reference(3.0).upper < tw_tail_reference(2.0).upper);
    CHECK(tw_tail_reference(3.0).lower < tw_tail_reference(2.0).lower);
    CHECK_THROWS_AS(tw_tail_reference(0.0), ParameterOutOfRange);
}

TEST_CASE("Gauss-Legendre rule") {
    for (int m : {4, 16, 33}) {
        const NystromGrid g = gauss_legendre(m);
        double s = 0, p = 0;
        for (int i = 0; i < m; ++i) {
            s += g.weights[i];
            p += g.weights[i] * std::pow(g.nodes[i], 2 * m - 2);
        }
        CHECK(s == Approx(2.0).epsilon(1e-14));
        CHECK(p == Approx(2.0 / (2 * m - 1)).epsilon(1e-12));
    }
}

TEST_CASE("Fredholm determinants") {
    const auto zero = [](double, double) { return 0.0; };
    CHECK(fredholm_det(zero, 0.0, 1.0).value == 1.0);
    // rank one kernel e^{-x-y} on (0, inf): det = 1 - 1/2
    const auto rank1 = [](double x, double y) { return std::exp(-x - y); };
    CHECK(fredholm_det(rank1, 0.0, INFINITY).value == Approx(0.5).epsilon(1e-10));
    CHECK_THROWS_AS(fredholm_det(airy_kernel, -12.0, INFINITY, 4, 1e-15, 8), NotConverged);
}

TEST_CASE("Tracy-Widom GUE distribution") {
    double prev = -1.0;
    for (double s = -6.0; s <= 4.0; s += 0.5) {
        const double F = tracy_widom_gue(s);
        CHECK(F >= prev);
        CHECK(F >= 0.0);
        CHECK(F <= 1.0);
        prev = F;
    }
    CHECK(tracy_widom_gue(-9.0) < 1e-20);
    CHECK(tracy_widom_gue(6.0) > 1.0 - 1e-8);
    CHECK(tracy_widom_gue(20.0) == 1.0);

    // mean of the distribution, -1.7710868874...
    double mean = 0.0;
    const double ds = 0.05;
    for (double s = -10.0; s < 8.0; s += ds) {
        const double mid = s + 0.5 * ds;
        mean += (mid < 0 ? -tracy_widom_gue(mid) : 1.0 - tracy_widom_gue(mid)) * ds;
    }
    CHECK(mean == Approx(-1.7710868874).margin(2e-4));

    // 1 - F(h) approaches the integrated Airy diagonal as h grows
    double prev_gap = INFINITY;
    for (double h : {-1.0, 0.0, 1.0, 2.0}) {
        const double gap = std::abs((1 - tracy_widom_gue(h)) / airy_tail_integral(h) - 1);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(std::abs((1 - tracy_widom_gue(4.0)) / airy_tail_integral(4.0) - 1) < 1e-3);
}
