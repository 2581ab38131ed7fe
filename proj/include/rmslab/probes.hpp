#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rmslab/problem.hpp"
#include "rmslab/schedule.hpp"

namespace rmslab {

/// One verified inequality: lhs <= rhs up to the declared tolerance.
/// margin = rhs - lhs; passed <=> margin >= -tolerance.
struct ProbeResult {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

ProbeResult make_probe_result(std::string name, double lhs, double rhs, double tolerance);

/// Pathwise accumulator inequality: with v_t = beta v_{t-1} + (1-beta) g_t^2,
///   (1-beta) sum_t g_t^2/v_t <= ln(v_k / (beta^k v_0)).
/// Deterministic; absolute slack only.
ProbeResult lemma1_probe(std::span<const double> g_seq, double v0, double beta);

/// ln(1-x) <= -x for all samples < 1 (the elementary anchor behind lemma 1);
/// reports the worst-margin sample.
ProbeResult log_inequality_probe(std::span<const double> samples);

/// beta^T >= e^{-2} for beta = 1 - 1/T, checked with no slack.
ProbeResult beta_floor_probe(std::int64_t T);

/// One recorded step of a momentum trajectory: pre-step iterate x^k, the
/// auxiliary z^k, the post-update accumulator v^k, the sampled gradient g^k,
/// and the pre-update accumulator (v^{k-1}) needed by the surrogate ~v.
struct TrajectoryPoint {
    std::vector<double> x;
    std::vector<double> z;
    std::vector<double> v;
    std::vector<double> v_before;
    std::vector<double> g;
};

/// Runs momentum_step for K steps from the problem's initial point and
/// records the quantities the lemma probes consume.
std::vector<TrajectoryPoint> record_momentum_trajectory(const Problem& p, const Schedule& sched,
                                                        std::int64_t K, std::uint64_t seed);

/// The three displayed trajectory inequalities relating ||grad f(x^k)||,
/// f(z^k) - f*, and the weighted sums of g_i^2/v_i. Requires a certified L.
/// Relative slack 1e-9 * (1 + |rhs|); each result reports its worst step.
std::vector<ProbeResult> lemma2_probe(std::span<const TrajectoryPoint> traj, const Problem& p,
                                      const Schedule& sched);

/// Monte-Carlo check of the surrogate-accumulator bound
///   sum_{i,k} E sqrt(~v_i^k) <= max{K sqrt(d sigma_s^2), sqrt(dT)}
///                               + 2 sum_{t,i} E |grad_i f(x^t)|^2/sqrt(~v_i^t),
/// where ~v_i^k = beta v_i^{k-1} + (1-beta)(|grad_i f(x^k)|^2 + sigma_i^2).
/// Seed-averaged with one-sided 3-standard-error slack on the paired
/// difference.
ProbeResult lemma6_probe(const Problem& p, const Schedule& sched, std::int64_t K, int n_seeds,
                         std::uint64_t base_seed);

/// Momentum-form vs heavy-ball-form trajectory agreement and the z-sequence
/// recursion residual, both over a shared sampled gradient sequence.
/// Deviations are measured per coordinate against max(|a|, |b|, 1).
std::vector<ProbeResult> equivalence_probe(const Problem& p, const Schedule& sched,
                                           std::int64_t steps, std::uint64_t seed);

struct AssumptionProbeOptions {
    std::size_t lipschitz_pairs = 1000;
    std::size_t mc_samples = 100000;
    std::uint64_t seed = 20240901;
};

/// Checks the standing assumptions on a problem instance: gradient Lipschitz
/// bound over random pairs, unbiasedness of the sampler within 5 standard
/// errors per coordinate, per-coordinate sample variance <= sigma_i^2 * 1.05
/// (Gaussian-noise kinds only), the stored sigma_s aggregate, and bitwise
/// determinism of the sampler.
std::vector<ProbeResult> assumption_probes(const Problem& p,
                                           const AssumptionProbeOptions& opt = {});

}  // namespace rmslab
