#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rmslab/problem.hpp"
#include "rmslab/schedule.hpp"
#include "rmslab/theory.hpp"

namespace rmslab {

enum class OptimizerKind { rmsprop, rmsprop_momentum, sgd };

std::string optimizer_name(OptimizerKind k);

/// Schedule request: gamma either explicit or resolved from the corollary
/// rule gamma = sqrt(f_gap/L) at the run's initial point.
struct ScheduleSpec {
    double gamma = 1.0;
    bool gamma_from_corollary = false;
    double lambda = 1.0;
    double theta = 0.0;
    std::int64_t T = 0;
};

struct InitSpec {
    enum class Kind { problem_default, ones, zeros, explicit_values };
    Kind kind = Kind::problem_default;
    double scale = 1.0;
    std::vector<double> values;
};

struct RunConfig {
    Problem problem;
    ScheduleSpec schedule;
    OptimizerKind optimizer = OptimizerKind::rmsprop;
    std::uint64_t seed = 0;
    std::int64_t record_every = 1;
    InitSpec init;
};

/// Per-iteration metrics, all computed from the exact gradient at the
/// pre-step iterate x^k; v_min/v_max describe the accumulator right after
/// step k's update. ratio is NaN when the gradient vanishes.
struct IterRecord {
    std::int64_t k = 0;
    double f_x = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    double ratio = 0.0;
    double v_min = 0.0;
    double v_max = 0.0;
};

struct RunSummary {
    double avg_g1 = 0.0;  // (1/T) sum_{k=1..T} ||grad f(x^k)||_1, every iteration
    double avg_g2 = 0.0;
    double min_f = 0.0;
    double final_f = 0.0;
    double f1 = 0.0;
    double f_gap = 0.0;
    BoundReport bound;
    std::uint64_t seed = 0;
};

struct RunResult {
    std::vector<IterRecord> records;
    RunSummary summary;
};

/// Raised when a trajectory produces a non-finite objective or gradient.
class RunAbortError : public std::runtime_error {
public:
    RunAbortError(std::uint64_t seed, std::int64_t iteration, const std::string& what)
        : std::runtime_error("run aborted at seed " + std::to_string(seed) + ", iteration " +
                             std::to_string(iteration) + ": " + what),
          seed(seed), iteration(iteration) {}
    std::uint64_t seed;
    std::int64_t iteration;
};

/// Resolves the initial point and the (possibly corollary-derived) schedule
/// for a config. f_gap_out receives f(x^1) - f*.
std::pair<std::vector<double>, Schedule> resolve_run(const RunConfig& cfg,
                                                     double* f_gap_out = nullptr);

/// Executes exactly T steps. Metrics use the exact gradient; the noisy sample
/// only drives the update. Records every record_every-th iteration plus the
/// final one.
RunResult run(const RunConfig& cfg);

struct SweepStats {
    double mean = 0.0;
    double se = 0.0;
    std::vector<double> per_seed;
};

/// Runs seeds base_seed + 0..n_seeds-1 (in parallel) and reduces avg_g1 in
/// seed order.
SweepStats seed_sweep(const RunConfig& cfg, int n_seeds, int jobs = 0);

struct TSweepRow {
    std::int64_t T = 0;
    bool admissible = false;
    double mean_avg_g1 = 0.0;
    double se = 0.0;
    double bound_rhs = 0.0;
    double term_noise = 0.0;
    double term_det = 0.0;
    double sgd_ref = 0.0;
    bool violation = false;  // mean - 3*se > bound_rhs
};

/// Re-derives the schedule at each grid T (skip-and-flag when inadmissible)
/// and pairs the seed-averaged empirical mean with the bound at that T.
std::vector<TSweepRow> t_sweep(const RunConfig& cfg, std::span<const std::int64_t> t_grid,
                               int n_seeds, int jobs = 0);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares on (ln T, ln value). Requires >= 3 points with
/// positive values.
RateFit fit_rate(std::span<const std::pair<double, double>> points);

}  // namespace rmslab
