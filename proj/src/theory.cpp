#include "rmslab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rmslab {

BoundReport compute_F(const Schedule& sched, double L, double f_gap, double sigma_s,
                      double min_sigma_sq) {
    if (!std::isfinite(L) || L <= 0.0)
        throw std::invalid_argument("compute_F: L must be finite and > 0");
    if (!std::isfinite(f_gap) || f_gap < 0.0)
        throw std::invalid_argument("compute_F: f_gap must be finite and >= 0");
    if (!std::isfinite(sigma_s) || sigma_s < 0.0)
        throw std::invalid_argument("compute_F: sigma_s must be finite and >= 0");
    if (!std::isfinite(min_sigma_sq) || min_sigma_sq < 0.0)
        throw std::invalid_argument("compute_F: min_sigma_sq must be finite and >= 0");

    const double e = std::numbers::e;
    const double gamma = sched.gamma;
    const double lambda = sched.lambda;
    const double theta = sched.theta;
    const double T = static_cast<double>(sched.T);
    const double d = static_cast<double>(sched.dim);

    BoundReport r;
    r.gamma = gamma;
    r.L = L;
    r.f_gap = f_gap;
    r.sigma_s = sigma_s;
    r.min_sigma_sq = min_sigma_sq;
    r.T = sched.T;
    r.dim = sched.dim;

    const double lg = 2.0 * L * gamma + 3.0;
    r.branch_smooth = 3.0 * lg * std::log(lg);
    r.branch_gap = 3.0 * f_gap / gamma;

    const double one_mt = std::pow(1.0 - theta, 1.5);
    const double noise_part = 6.0 * e * sigma_s / std::sqrt(lambda * T);
    const double a = noise_part + 3.0 * L * gamma / one_mt + 3.0;
    r.branch_noise = 3.0 * a * std::log(a);

    const double b = noise_part + 3.0 * L * gamma / one_mt;
    const double floor = std::max(d * min_sigma_sq, 1.0 / T);
    const double c = 4.0 * L * gamma * e * e / (lambda * floor) *
                         (1.0 + theta * theta / (2.0 * T * (1.0 - theta) * (1.0 - theta))) +
                     12.0 / lambda;
    r.branch_log = b * std::log(c);

    const double f_over_gamma =
        std::max({1.0, r.branch_smooth, r.branch_gap, r.branch_noise, r.branch_log});
    r.F = gamma * f_over_gamma;

    const RhsTerms terms = theorem_rhs(r.F, gamma, sigma_s, sched.T, sched.dim);
    r.term_noise = terms.term_noise;
    r.term_det = terms.term_det;
    r.rhs = terms.rhs;

    // First term dominates (corollary sense) once T >= L f_gap / sigma_s^2.
    r.dominant = (sigma_s > 0.0 && T >= L * f_gap / (sigma_s * sigma_s))
                     ? Regime::noise
                     : Regime::deterministic;
    return r;
}

RhsTerms theorem_rhs(double F, double gamma, double sigma_s, std::int64_t T, std::size_t dim) {
    const double Td = static_cast<double>(T);
    const double sd = std::sqrt(static_cast<double>(dim));
    RhsTerms t;
    t.term_noise = sd / std::pow(Td, 0.25) * std::sqrt(2.0 * F * sigma_s / gamma);
    t.term_det = sd / std::sqrt(Td) * 4.0 * F / gamma;
    t.rhs = t.term_noise + t.term_det;
    return t;
}

double corollary_gamma(double L, double f_gap) {
    if (!std::isfinite(L) || L <= 0.0)
        throw std::invalid_argument("corollary_gamma: L must be finite and > 0");
    if (!std::isfinite(f_gap) || f_gap <= 0.0)
        throw std::invalid_argument("corollary_gamma: f_gap must be finite and > 0");
    return std::sqrt(f_gap / L);
}

CorollaryThresholds corollary_thresholds(double L, double f_gap, double sigma_s,
                                         double lambda) {
    if (L <= 0.0 || f_gap <= 0.0 || lambda <= 0.0)
        throw std::invalid_argument("corollary_thresholds: inputs must be positive");
    CorollaryThresholds t;
    t.T_sharp_window = sigma_s * sigma_s / (lambda * L * f_gap);
    t.T_noise_dominant = sigma_s > 0.0
                             ? L * f_gap / (sigma_s * sigma_s)
                             : std::numeric_limits<double>::infinity();
    return t;
}

double sgd_reference(double L, double f_gap, double sigma_s, std::int64_t T) {
    if (L <= 0.0 || f_gap < 0.0 || sigma_s < 0.0 || T <= 0)
        throw std::invalid_argument("sgd_reference: inputs out of range");
    return std::pow(sigma_s * sigma_s * L * f_gap, 0.25) /
           std::pow(static_cast<double>(T), 0.25);
}

std::string regime_name(Regime r) {
    return r == Regime::noise ? "noise" : "deterministic";
}

}  // namespace rmslab
