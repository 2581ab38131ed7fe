#pragma once

#include <cstdint>
#include <string>

#include "rmslab/schedule.hpp"

namespace rmslab {

enum class Regime { noise, deterministic };

/// The explicit constant F of the convergence bound and the two terms of its
/// right-hand side. branch_* are the four non-trivial arguments of the max
/// defining F/gamma (the constant floor 1 never binds: branch_smooth alone
/// is >= 9 ln 3).
struct BoundReport {
    double F = 0.0;
    double branch_smooth = 0.0;  // 3(2Lg+3) ln(2Lg+3)
    double branch_gap = 0.0;     // 3(f(x1)-f*)/g
    double branch_noise = 0.0;   // 3A ln A,  A = 6e*sigma_s/sqrt(lam T) + 3Lg/(1-theta)^1.5 + 3
    double branch_log = 0.0;     // B ln C,   B = A - 3,
                                 //           C = 4Lg e^2/(lam max{d min_i sig_i^2, 1/T})
                                 //               * (1 + theta^2/(2T(1-theta)^2)) + 12/lam
    double term_noise = 0.0;     // sqrt(d)/T^{1/4} * sqrt(2 F sigma_s / gamma)
    double term_det = 0.0;       // sqrt(d)/sqrt(T) * 4F/gamma
    double rhs = 0.0;
    Regime dominant = Regime::deterministic;

    // Echo of the inputs, for reports.
    double gamma = 0.0;
    double L = 0.0;
    double f_gap = 0.0;
    double sigma_s = 0.0;
    double min_sigma_sq = 0.0;
    std::int64_t T = 0;
    std::size_t dim = 0;
};

struct RhsTerms {
    double term_noise = 0.0;
    double term_det = 0.0;
    double rhs = 0.0;
};

/// Evaluates F (max of the closed-form branches, exactly as written) and the
/// two right-hand-side terms for the given schedule and problem constants.
/// f_gap = f(x^1) - f*, min_sigma_sq = min_i sigma_i^2.
BoundReport compute_F(const Schedule& sched, double L, double f_gap, double sigma_s,
                      double min_sigma_sq);

/// The two bound terms for an already-computed F.
RhsTerms theorem_rhs(double F, double gamma, double sigma_s, std::int64_t T, std::size_t dim);

/// gamma = sqrt((f(x^1) - f*)/L).
double corollary_gamma(double L, double f_gap);

/// Iteration thresholds quoted alongside the corollary: the schedule is in
/// its sharp window once T >= sigma_s^2/(lambda L f_gap), and the T^{-1/4}
/// term dominates once T >= L f_gap / sigma_s^2 (infinity when sigma_s = 0).
struct CorollaryThresholds {
    double T_sharp_window = 0.0;
    double T_noise_dominant = 0.0;
};

CorollaryThresholds corollary_thresholds(double L, double f_gap, double sigma_s, double lambda);

/// Reference curve (sigma_s^2 L f_gap)^{1/4} / T^{1/4} with the order
/// constant fixed to 1. A comparison curve, not a certified bound.
double sgd_reference(double L, double f_gap, double sigma_s, std::int64_t T);

std::string regime_name(Regime r);

}  // namespace rmslab
