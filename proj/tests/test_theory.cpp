#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rmslab/theory.hpp"

using namespace rmslab;

namespace {

Schedule plain_schedule(double gamma, double lambda, double theta, std::int64_t T,
                        std::size_t d, double sigma_i) {
    return derive_schedule(gamma, lambda, theta, T, d, std::vector<double>(d, sigma_i));
}

}  // namespace

TEST_CASE("F branches for the noiseless reference point") {
    // gamma=1, lambda=1, theta=0, L=1, f_gap=0, sigma_s=0, T=1e4, d=10.
    // Frozen from an independent evaluation of the closed forms.
    const Schedule s = plain_schedule(1.0, 1.0, 0.0, 10000, 10, 0.0);
    const BoundReport r = compute_F(s, 1.0, 0.0, 0.0, 0.0);
    CHECK(r.branch_smooth == doctest::Approx(24.141568686511505).epsilon(1e-12));  // 15 ln 5
    CHECK(r.branch_gap == 0.0);
    CHECK(r.branch_noise == doctest::Approx(32.251670446104988).epsilon(1e-12));  // 18 ln 6
    CHECK(r.branch_log == doctest::Approx(37.790025998570592).epsilon(1e-12));
    CHECK(r.F == doctest::Approx(37.790025998570592).epsilon(1e-12));
    CHECK(r.dominant == Regime::deterministic);
    // sigma_s = 0 zeroes the noise term.
    CHECK(r.term_noise == 0.0);
    CHECK(r.rhs == r.term_det);
}

TEST_CASE("branch recomputation from raw inputs is bit-identical") {
    const double gamma = 1.6583123951777;
    const double lambda = 0.8;
    const double theta = 0.9;
    const double L = 1.0;
    const double f_gap = 2.75;
    const double sigma_s = 0.9486832980505138;
    const double min_sig_sq = 0.09;
    const std::int64_t T = 4096;
    const std::size_t d = 10;
    const Schedule s =
        derive_schedule(gamma, lambda, theta, T, d, std::vector<double>(d, 0.3));
    const BoundReport r = compute_F(s, L, f_gap, sigma_s, min_sig_sq);

    const double e = std::numbers::e;
    const double b_smooth = 3.0 * (2.0 * L * gamma + 3.0) * std::log(2.0 * L * gamma + 3.0);
    const double b_gap = 3.0 * f_gap / gamma;
    const double noise_part =
        6.0 * e * sigma_s / std::sqrt(lambda * static_cast<double>(T));
    const double a = noise_part + 3.0 * L * gamma / std::pow(1.0 - theta, 1.5) + 3.0;
    const double b_noise = 3.0 * a * std::log(a);
    const double b = noise_part + 3.0 * L * gamma / std::pow(1.0 - theta, 1.5);
    const double c =
        4.0 * L * gamma * e * e /
            (lambda * std::max(static_cast<double>(d) * min_sig_sq,
                               1.0 / static_cast<double>(T))) *
            (1.0 + theta * theta /
                       (2.0 * static_cast<double>(T) * (1.0 - theta) * (1.0 - theta))) +
        12.0 / lambda;
    const double b_log = b * std::log(c);

    CHECK(r.branch_smooth == b_smooth);
    CHECK(r.branch_gap == b_gap);
    CHECK(r.branch_noise == b_noise);
    CHECK(r.branch_log == b_log);
    CHECK(r.F == gamma * std::max({1.0, b_smooth, b_gap, b_noise, b_log}));
}

TEST_CASE("F/gamma never drops below 1") {
    for (double L : {1e-6, 0.1, 1.0, 50.0}) {
        for (double gap : {0.0, 1.0, 100.0}) {
            const Schedule s = plain_schedule(0.5, 1.0, 0.0, 1024, 4, 0.2);
            const BoundReport r = compute_F(s, L, gap, 0.4, 0.04);
            CHECK(r.F / s.gamma >= 1.0);
        }
    }
}

TEST_CASE("F is monotone in the initial gap") {
    const Schedule s = plain_schedule(1.0, 1.0, 0.0, 1024, 4, 0.2);
    double prev = 0.0;
    for (double gap : {0.0, 1.0, 10.0, 100.0, 1000.0}) {
        const BoundReport r = compute_F(s, 1.0, gap, 0.4, 0.04);
        CHECK(r.F >= prev);
        prev = r.F;
    }
}

TEST_CASE("compute_F rejects bad inputs") {
    const Schedule s = plain_schedule(1.0, 1.0, 0.0, 1024, 4, 0.2);
    CHECK_THROWS_AS(compute_F(s, 0.0, 1.0, 0.4, 0.04), std::invalid_argument);
    CHECK_THROWS_AS(compute_F(s, -1.0, 1.0, 0.4, 0.04), std::invalid_argument);
    CHECK_THROWS_AS(compute_F(s, 1.0, -0.5, 0.4, 0.04), std::invalid_argument);
}

TEST_CASE("theorem rhs hand example") {
    // d=4, T=256, F/gamma=2, sigma_s=1, gamma=1 -> term_noise=1, term_det=1.
    const RhsTerms t = theorem_rhs(2.0, 1.0, 1.0, 256, 4);
    CHECK(t.term_noise == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t.term_det == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t.rhs == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("rhs scaling in T") {
    // T x16 with F fixed: term_noise halves, term_det quarters.
    const RhsTerms a = theorem_rhs(3.0, 1.0, 0.7, 256, 9);
    const RhsTerms b = theorem_rhs(3.0, 1.0, 0.7, 256 * 16, 9);
    CHECK(b.term_noise == doctest::Approx(a.term_noise / 2.0).epsilon(1e-12));
    CHECK(b.term_det == doctest::Approx(a.term_det / 4.0).epsilon(1e-12));
    CHECK(a.term_noise >= 0.0);
    CHECK(a.term_det >= 0.0);
}

TEST_CASE("regime classification follows the corollary condition") {
    // dominant = noise iff T >= L*f_gap/sigma_s^2.
    const Schedule s = plain_schedule(1.0, 1.0, 0.0, 100, 2, 0.1);
    const double sigma_s = std::sqrt(2.0 * 0.01);
    // L*f_gap/sigma_s^2 = 1*1/0.02 = 50 <= 100 -> noise.
    CHECK(compute_F(s, 1.0, 1.0, sigma_s, 0.01).dominant == Regime::noise);
    // L*f_gap/sigma_s^2 = 1*100/0.02 = 5000 > 100 -> deterministic.
    CHECK(compute_F(s, 1.0, 100.0, sigma_s, 0.01).dominant == Regime::deterministic);
    // sigma_s = 0 -> deterministic by convention.
    const Schedule s0 = plain_schedule(1.0, 1.0, 0.0, 100, 2, 0.0);
    CHECK(compute_F(s0, 1.0, 0.0, 0.0, 0.0).dominant == Regime::deterministic);
}

TEST_CASE("corollary gamma") {
    CHECK(corollary_gamma(1.0, 1.0) == 1.0);
    CHECK(corollary_gamma(4.0, 1.0) == 0.5);
    CHECK_THROWS_AS(corollary_gamma(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(corollary_gamma(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("corollary thresholds") {
    const CorollaryThresholds t = corollary_thresholds(2.0, 3.0, 4.0, 0.5);
    CHECK(t.T_sharp_window == doctest::Approx(16.0 / 3.0).epsilon(1e-15));  // 16/(0.5*6)
    CHECK(t.T_noise_dominant == doctest::Approx(6.0 / 16.0).epsilon(1e-15));
    CHECK(std::isinf(corollary_thresholds(2.0, 3.0, 0.0, 0.5).T_noise_dominant));
}

TEST_CASE("sgd reference curve") {
    CHECK(sgd_reference(1.0, 1.0, 1.0, 16) == 0.5);
    // x16 in T halves the value.
    CHECK(sgd_reference(2.0, 3.0, 0.7, 16 * 256) ==
          doctest::Approx(sgd_reference(2.0, 3.0, 0.7, 256) / 2.0).epsilon(1e-12));
    CHECK(sgd_reference(1.0, 1.0, 0.0, 16) == 0.0);
}

TEST_CASE("rhs terms decrease monotonically in T at fixed F") {
    double prev_noise = std::numeric_limits<double>::infinity();
    double prev_det = std::numeric_limits<double>::infinity();
    for (std::int64_t T = 64; T <= 1 << 20; T *= 4) {
        const RhsTerms t = theorem_rhs(5.0, 1.3, 0.8, T, 16);
        CHECK(t.term_noise < prev_noise);
        CHECK(t.term_det < prev_det);
        prev_noise = t.term_noise;
        prev_det = t.term_det;
    }
}
