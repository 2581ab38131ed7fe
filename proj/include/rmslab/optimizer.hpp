#pragma once

#include <span>
#include <vector>

#include "rmslab/schedule.hpp"

namespace rmslab {

/// Trajectory state shared by both update forms. x_prev mirrors x at k = 0
/// (the x^0 = x^1 convention), and v starts at the schedule's v0 > 0, which is
/// what keeps every divide-by-sqrt(v) well defined without an epsilon.
struct OptimizerState {
    std::vector<double> x;
    std::vector<double> x_prev;
    std::vector<double> v;
    std::vector<double> m;
    std::int64_t k = 0;
};

OptimizerState make_state(std::vector<double> x1, const Schedule& sched);

/// v' = beta*v + (1-beta)*g^2, coordinate-wise. Shared by all update forms.
void update_v(std::span<double> v, std::span<const double> g, double beta);

/// One exponential-moving-average step: v-update then x -= eta * g/sqrt(v').
/// No epsilon in the denominator; positivity comes from v0 > 0.
/// m is left untouched.
void rmsprop_step(OptimizerState& state, std::span<const double> g, const Schedule& sched);

/// Momentum form: v-update, then m' = theta*m + (1-theta)*g/sqrt(v'), then
/// x -= eta*m', in that order. With theta = 0 the x-update evaluates the same
/// scalar expressions as rmsprop_step, so the reduction is bit-exact.
void momentum_step(OptimizerState& state, std::span<const double> g, const Schedule& sched);

/// Heavy-ball form of the momentum update:
///   x_next = x_k - eta*(1-theta)/sqrt(v_new) * g + theta*(x_k - x_km1),
/// where v_new is the already-updated accumulator for this step.
std::vector<double> heavy_ball_step(std::span<const double> x_k, std::span<const double> x_km1,
                                    std::span<const double> v_new, std::span<const double> g,
                                    const Schedule& sched);

/// Auxiliary iterate z_k = x_k/(1-theta) - theta*x_km1/(1-theta), which
/// evolves like a momentum-free method along momentum trajectories.
std::vector<double> z_of(std::span<const double> x_k, std::span<const double> x_km1,
                         double theta);

/// Plain SGD reference update x -= eta_sgd * g (v and m untouched).
void sgd_step(OptimizerState& state, std::span<const double> g, double eta_sgd);

}  // namespace rmslab
