#include "catch_amalgamated.hpp"

#include "s6v/verify.hpp"

#include <cmath>

using namespace s6v;
using Catch::Approx;

TEST_CASE("check report bookkeeping") {
    CheckReport r;
    r.lhs = 1.0 + 1e-9;
    r.rhs = 1.0;
    r.tolerance = 1e-8;
    r.finish();
    CHECK(r.pass);
    CHECK(r.rel_err == Approx(1e-9).epsilon(1e-6));
    r.tolerance = 1e-10;
    r.finish();
    CHECK(!r.pass);
    r.rhs = 0.0;
    r.lhs = 1e-12;
    r.use_abs = true;
    r.finish();
    CHECK(r.pass);
    r.runtime = 3.0;
    CHECK(!r.to_json().contains("runtime"));
    CHECK(r.to_json(true)["runtime"] == 3.0);
}

TEST_CASE("q-Laplace identity between the height and the Meixner ensemble") {
    const CheckReport z = check_bo_identity(0.25, 3.0, 4, 6, 0.0);
    CHECK(z.rel_err <= 1e-14);
    CHECK(z.lhs == Approx(1.0).epsilon(1e-14));

    for (double zeta : {0.5, 1.0, 2.0}) {
        const CheckReport r = check_bo_identity(0.25, 3.0, 4, 6, zeta);
        CHECK(r.pass);
        CHECK(r.rel_err <= 1e-8);
        CHECK(r.notes["matching_ordering"] == "column_N_row_M");
        CHECK(r.notes["column_M_row_N"]["rel_err"].get<double>() > 1e-3);
        CHECK(r.notes["column_N_row_M"]["rel_err_trailing_from_0"].get<double>() > 1e-3);
    }
    CHECK(check_bo_identity(0.2, 4.0, 3, 8, 0.5).rel_err <= 1e-8);

    struct Pt {
        double q, u;
        int M, N;
        double zeta;
    };
    for (const Pt& p : {Pt{0.2, 4.0, 3, 5, 1.0}, Pt{0.25, 3.0, 5, 3, 2.0}, Pt{0.4, 3.0, 2, 6, 0.5}, Pt{0.4, 3.0, 4, 7, 2.0},
                        Pt{0.2, 2.5, 6, 4, 0.5}, Pt{0.25, 5.0, 2, 9, 1.0}})
        CHECK(check_bo_identity(p.q, p.u, p.M, p.N, p.zeta).rel_err <= 1e-8);
    CHECK_THROWS_AS(check_bo_identity(0.25, 3.0, 4, 4, 1.0), ParameterOutOfRange);
}

TEST_CASE("deformation formula") {
    const CheckReport r = check_deformation_formula(2.0, 0.3, 3, 0.0, 2.0, 0.5, 1.0, 3.0);
    CHECK(r.pass);
    CHECK(r.rel_err <= 1e-6);
    CHECK(r.notes["undeformed_weight_variant"]["rel_err"].get<double>() > 1e-2);

    const CheckReport same = check_deformation_formula(2.0, 0.3, 3, 1.0, 1.0, 0.5, 1.0, 3.0);
    CHECK(same.lhs == 0.0);
    CHECK(same.rhs == 0.0);
    CHECK(same.pass);

    // one particle: log of a ratio of single sums
    const double t = 0.7, a = 2.0, N = 2.0, s = -1.0, S = 1.5;
    const CheckReport one = check_deformation_formula(3.0, 0.4, 1, s, S, t, a, N);
    const DiscreteWeight w = meixner_weight(3.0, 0.4, 1);
    double zs = 0, zS = 0;
    for (int x = 1; x <= w.x_max(); ++x) {
        zs += (1 + std::exp(-t * (x - a * N) - s)) * w.at(x);
        zS += (1 + std::exp(-t * (x - a * N) - S)) * w.at(x);
    }
    CHECK(one.lhs == Approx(std::log(zs / zS)).epsilon(1e-12));
    CHECK(one.rel_err <= 1e-10);
    CHECK_THROWS_AS(check_deformation_formula(2.0, 0.3, 7, 0.0, 1.0, 0.5, 1.0, 3.0), ParameterOutOfRange);
    CHECK_THROWS_AS(check_deformation_formula(2.0, 0.3, 2, 1.0, 0.0, 0.5, 1.0, 3.0), ParameterOutOfRange);
}

TEST_CASE("Poisson summation") {
    for (double t : {0.5, 1.0, 2.0, 3.0, 5.0})
        for (double u : {-1.0, 0.0, 0.3, 1.1, 2.5}) {
            const CheckReport r = check_poisson_summation(t, u);
            CHECK(r.pass);
            CHECK(r.rel_err <= 1e-12);
            CHECK(r.notes["theta_route"]["rel_err"].get<double>() <= 1e-12);
        }
    const CheckReport p = check_poisson_summation(1.0, 0.3);
    CHECK(p.notes["coefficient_8pi_variant"]["rel_err"].get<double>() > 1e-9);
    CHECK(poisson_lattice_sum(1.3, 0.4) == Approx(poisson_lattice_sum(1.3, 0.4 + 1.3)).epsilon(1e-13));
    CHECK(poisson_fourier_side(1.3, 0.4, 200, 8 * kPi * kPi) ==
          Approx(poisson_fourier_side(1.3, 1.7, 200, 8 * kPi * kPi)).epsilon(1e-13));
    CHECK(poisson_fourier_side(1.3, 0.4, 200, 8 * kPi * kPi) ==
          Approx(poisson_fourier_side(1.3, -0.4, 200, 8 * kPi * kPi)).epsilon(1e-15));
    CHECK_THROWS_AS(check_poisson_summation(0.0, 1.0), ParameterOutOfRange);
}

TEST_CASE("a priori product estimate") {
    const double t = std::log(4.0);
    const CheckReport mid = check_apriori_product(0.05, 1.5, t, 150, 2 * std::sqrt(150.0));
    CHECK(mid.pass);
    CHECK(mid.lhs > 0.5);
    CHECK(mid.lhs < 2.0);
    const double e100 = std::abs(check_apriori_product(0.05, 1.5, t, 100, 20.0).lhs - 1);
    const double e300 = std::abs(check_apriori_product(0.05, 1.5, t, 300, 2 * std::sqrt(300.0)).lhs - 1);
    CHECK(e300 < e100);
    CHECK(mid.notes["partition_ratio_log_S"].get<double>() == Approx(mid.notes["log_S"].get<double>()).epsilon(1e-6));
    CHECK_THROWS_AS(check_apriori_product(0.05, 1.5, t, 301, 10.0), ParameterOutOfRange);
}

TEST_CASE("moderate deviation plumbing") {
    CHECK(classify_regime(2.5) == Regime::Upper);
    CHECK(classify_regime(0.0) == Regime::Critical);
    CHECK(classify_regime(-3.0) == Regime::Lower);

    const MeixnerSide m = meixner_side(0.25, 40.0, 1.5, 100);
    CHECK(md_sigma(m, 1.0) == Approx(1.0 - 1.0 / (m.sc.c * std::cbrt(100.0))));
    const CheckReport crit = moderate_deviation_report(m, 0.0);
    CHECK(crit.pass);
    CHECK(std::isfinite(crit.lhs));
    CHECK(crit.lhs < 0.0);
    CHECK(crit.rhs == Approx(std::log(tracy_widom_gue(md_sigma(m, 0.0)))).epsilon(1e-12));

    // log L decreases as the deformation moves into the bulk
    CHECK(md_log_qlaplace(m, -3.0) < md_log_qlaplace(m, 0.0));
    CHECK(md_log_qlaplace(m, 0.0) < md_log_qlaplace(m, 2.5));
    CHECK(md_log_qlaplace(m, 2.5) < 0.0);

    CHECK_THROWS_AS(moderate_deviation_report(m, 2.5, nullptr, Regime::Lower), RegimeMismatch);
    CHECK_THROWS_AS(check_moderate_deviation(0.25, 40.0, 1.5, 401, {2.5}), ParameterOutOfRange);
    CHECK_THROWS_AS(meixner_side(0.25, 40.0, 25.0, 100), SlopeOutOfLiquidRegion);
}

TEST_CASE("Kolmogorov-Smirnov distance") {
    auto U = [](double x) { return std::clamp(x, 0.0, 1.0); };
    CHECK(ks_distance({0.5}, U) == Approx(0.5));
    CHECK(ks_distance({0.5, 0.5}, U) == Approx(0.5));
    std::vector<double> grid;
    for (int i = 0; i < 1000; ++i) grid.push_back((i + 0.5) / 1000.0);
    CHECK(ks_distance(grid, U) == Approx(0.0005).epsilon(1e-9));
}

TEST_CASE("Tracy-Widom sample report") {
    const TwSample a = tw_sample(0.25, 40.0, 1.5, 64, 500, 9, 1);
    const TwSample b = tw_sample(0.25, 40.0, 1.5, 64, 500, 9, 3);
    CHECK(a.heights == b.heights);
    const CheckReport r = tw_clt_report(a);
    CHECK(r.lhs > 0.0);
    CHECK(r.lhs < 0.3);
    CHECK(r.to_json() == tw_clt_report(b).to_json());
    CHECK_THROWS_AS(check_tw_clt(0.25, 40.0, 1.5, 2048, 10, 1, 1), ParameterOutOfRange);
}
