#include "rmslab/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace rmslab {

namespace {

void require_dim(std::size_t got, std::size_t want, const char* who) {
    if (got != want) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

void require_finite(std::span<const double> g, const char* who) {
    for (double gi : g) {
        if (!std::isfinite(gi))
            throw std::invalid_argument(std::string(who) + ": non-finite gradient entry");
    }
}

inline double updated_v(double v, double g, double beta) {
    return beta * v + (1.0 - beta) * g * g;
}

}  // namespace

OptimizerState make_state(std::vector<double> x1, const Schedule& sched) {
    require_dim(x1.size(), sched.dim, "make_state");
    OptimizerState s;
    s.x = std::move(x1);
    s.x_prev = s.x;  // x^0 = x^1
    s.v = sched.v0;
    s.m.assign(sched.dim, 0.0);
    s.k = 0;
    return s;
}

void update_v(std::span<double> v, std::span<const double> g, double beta) {
    require_dim(g.size(), v.size(), "update_v");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = updated_v(v[i], g[i], beta);
}

void rmsprop_step(OptimizerState& state, std::span<const double> g, const Schedule& sched) {
    require_dim(g.size(), state.x.size(), "rmsprop_step");
    require_finite(g, "rmsprop_step");
    state.x_prev = state.x;
    for (std::size_t i = 0; i < state.x.size(); ++i) {
        const double vi = updated_v(state.v[i], g[i], sched.beta);
        if (!(vi > 0.0)) throw std::logic_error("rmsprop_step: accumulator lost positivity");
        state.v[i] = vi;
        const double r = g[i] / std::sqrt(vi);
        state.x[i] -= sched.eta * r;
    }
    ++state.k;
}

void momentum_step(OptimizerState& state, std::span<const double> g, const Schedule& sched) {
    require_dim(g.size(), state.x.size(), "momentum_step");
    require_finite(g, "momentum_step");
    const double theta = sched.theta;
    state.x_prev = state.x;
    for (std::size_t i = 0; i < state.x.size(); ++i) {
        const double vi = updated_v(state.v[i], g[i], sched.beta);
        if (!(vi > 0.0)) throw std::logic_error("momentum_step: accumulator lost positivity");
        state.v[i] = vi;
        const double r = g[i] / std::sqrt(vi);
        // theta == 0 makes m_new == r bitwise, matching rmsprop_step exactly.
        const double m_new = theta * state.m[i] + (1.0 - theta) * r;
        state.m[i] = m_new;
        state.x[i] -= sched.eta * m_new;
    }
    ++state.k;
}

std::vector<double> heavy_ball_step(std::span<const double> x_k, std::span<const double> x_km1,
                                    std::span<const double> v_new, std::span<const double> g,
                                    const Schedule& sched) {
    require_dim(x_km1.size(), x_k.size(), "heavy_ball_step");
    require_dim(v_new.size(), x_k.size(), "heavy_ball_step");
    require_dim(g.size(), x_k.size(), "heavy_ball_step");
    const double theta = sched.theta;
    std::vector<double> x_next(x_k.size());
    for (std::size_t i = 0; i < x_k.size(); ++i) {
        x_next[i] = x_k[i] - sched.eta * (1.0 - theta) / std::sqrt(v_new[i]) * g[i] +
                    theta * (x_k[i] - x_km1[i]);
    }
    return x_next;
}

std::vector<double> z_of(std::span<const double> x_k, std::span<const double> x_km1,
                         double theta) {
    require_dim(x_km1.size(), x_k.size(), "z_of");
    std::vector<double> z(x_k.size());
    const double denom = 1.0 - theta;
    for (std::size_t i = 0; i < x_k.size(); ++i) {
        z[i] = x_k[i] / denom - theta * x_km1[i] / denom;
    }
    return z;
}

void sgd_step(OptimizerState& state, std::span<const double> g, double eta_sgd) {
    require_dim(g.size(), state.x.size(), "sgd_step");
    require_finite(g, "sgd_step");
    state.x_prev = state.x;
    for (std::size_t i = 0; i < state.x.size(); ++i) state.x[i] -= eta_sgd * g[i];
    ++state.k;
}

}  // namespace rmslab
