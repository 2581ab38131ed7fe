#include "rmslab/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rmslab/optimizer.hpp"
#include "rmslab/parallel.hpp"

namespace rmslab {

namespace {

double l2_norm_sq(std::span<const double> a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return s;
}

double diff_norm_sq(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct Mean {
    double mean = 0.0;
    double se = 0.0;
};

Mean mean_and_se(std::span<const double> xs) {
    Mean m;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) m.mean += x;
    m.mean /= n;
    if (xs.size() < 2) return m;
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return m;
}

}  // namespace

ProbeResult make_probe_result(std::string name, double lhs, double rhs, double tolerance) {
    ProbeResult r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.tolerance = tolerance;
    r.passed = r.margin >= -tolerance;
    return r;
}

ProbeResult lemma1_probe(std::span<const double> g_seq, double v0, double beta) {
    if (!(v0 > 0.0) || !std::isfinite(v0))
        throw std::invalid_argument("lemma1_probe: v0 must be finite and > 0");
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("lemma1_probe: beta must lie in (0, 1)");
    double v = v0;
    double lhs = 0.0;
    for (double g : g_seq) {
        v = beta * v + (1.0 - beta) * g * g;
        lhs += g * g / v;
    }
    lhs *= 1.0 - beta;
    // ln(v_k / (beta^k v0)) in decomposed form; beta^k can underflow for long
    // sequences while the logarithm stays moderate.
    const double k = static_cast<double>(g_seq.size());
    const double rhs = std::log(v) - k * std::log(beta) - std::log(v0);
    return make_probe_result("lemma1", lhs, rhs, 1e-12);
}

ProbeResult log_inequality_probe(std::span<const double> samples) {
    double worst_lhs = -std::numeric_limits<double>::infinity();
    double worst_rhs = 0.0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (double x : samples) {
        if (!(x < 1.0)) throw std::invalid_argument("log_inequality_probe: sample >= 1");
        const double lhs = std::log1p(-x);
        const double rhs = -x;
        if (rhs - lhs < worst_margin) {
            worst_margin = rhs - lhs;
            worst_lhs = lhs;
            worst_rhs = rhs;
        }
    }
    if (samples.empty()) return make_probe_result("log_inequality", 0.0, 0.0, 0.0);
    return make_probe_result("log_inequality", worst_lhs, worst_rhs, 1e-15);
}

ProbeResult beta_floor_probe(std::int64_t T) {
    if (T < 2) throw std::invalid_argument("beta_floor_probe: T must be >= 2");
    const double beta = 1.0 - 1.0 / static_cast<double>(T);
    const double lhs = std::exp(-2.0);
    const double rhs = std::pow(beta, static_cast<double>(T));
    return make_probe_result("beta_floor_T" + std::to_string(T), lhs, rhs, 0.0);
}

std::vector<TrajectoryPoint> record_momentum_trajectory(const Problem& p, const Schedule& sched,
                                                        std::int64_t K, std::uint64_t seed) {
    if (K <= 0 || K > sched.T)
        throw std::invalid_argument("record_momentum_trajectory: need 0 < K <= T");
    auto rng = make_stream(seed, Stream::gradient_noise);
    OptimizerState state = make_state(p.initial_point(), sched);
    std::vector<TrajectoryPoint> traj;
    traj.reserve(static_cast<std::size_t>(K));
    for (std::int64_t k = 1; k <= K; ++k) {
        TrajectoryPoint pt;
        pt.x = state.x;
        pt.z = z_of(state.x, state.x_prev, sched.theta);
        pt.v_before = state.v;
        GradSample s = p.sample_gradient(state.x, rng);
        pt.g = s.g;
        momentum_step(state, pt.g, sched);
        pt.v = state.v;
        traj.push_back(std::move(pt));
    }
    return traj;
}

std::vector<ProbeResult> lemma2_probe(std::span<const TrajectoryPoint> traj, const Problem& p,
                                      const Schedule& sched) {
    if (!p.smoothness_certified())
        throw std::invalid_argument("lemma2_probe: requires a certified smoothness constant");
    if (traj.empty()) throw std::invalid_argument("lemma2_probe: empty trajectory");

    const double L = p.smoothness();
    const double theta = sched.theta;
    const double eta = sched.eta;
    const double f_star = p.f_star();
    const double c1 = L * L * theta * theta * eta * eta / (1.0 - theta);
    const double c3 = L * theta * theta * eta * eta / (2.0 * (1.0 - theta) * (1.0 - theta));

    struct Worst {
        double margin = std::numeric_limits<double>::infinity();
        double lhs = 0.0;
        double rhs = 0.0;
        void consider(double lhs_k, double rhs_k) {
            const double m = (rhs_k - lhs_k) / (1.0 + std::abs(rhs_k));
            if (m < margin) {
                margin = m;
                lhs = lhs_k;
                rhs = rhs_k;
            }
        }
    };
    Worst w1, w2, w3;

    double weighted = 0.0;  // sum_{t<k} theta^{k-1-t} s_t, advanced per step
    double plain = 0.0;     // sum_{t<k} s_t
    double grad_sq_sum = 0.0;
    double gap_sum = 0.0;

    for (std::size_t k = 0; k < traj.size(); ++k) {
        const TrajectoryPoint& pt = traj[k];
        const std::vector<double> gx = p.gradient(pt.x);
        const std::vector<double> gz = p.gradient(pt.z);
        const double fz_gap = p.value(pt.z) - f_star;

        w1.consider(diff_norm_sq(gx, gz), c1 * weighted);

        const double grad_sq = l2_norm_sq(gx);
        w2.consider(grad_sq, 4.0 * L * fz_gap + 2.0 * c1 * weighted);

        grad_sq_sum += grad_sq;
        gap_sum += fz_gap;
        w3.consider(grad_sq_sum, 4.0 * L * (gap_sum + c3 * plain));

        double s_k = 0.0;  // sum_i g_i^2 / v_i with the post-update accumulator
        for (std::size_t i = 0; i < pt.g.size(); ++i) s_k += pt.g[i] * pt.g[i] / pt.v[i];
        weighted = theta * weighted + s_k;
        plain += s_k;
    }

    constexpr double tol = 1e-9;
    auto finish = [&](const char* name, const Worst& w) {
        ProbeResult r;
        r.name = name;
        r.lhs = w.lhs;
        r.rhs = w.rhs;
        r.margin = w.margin;  // normalized by 1 + |rhs|
        r.tolerance = tol;
        r.passed = w.margin >= -tol;
        return r;
    };
    return {finish("lemma2_grad_gap", w1), finish("lemma2_grad_bound", w2),
            finish("lemma2_summed", w3)};
}

ProbeResult lemma6_probe(const Problem& p, const Schedule& sched, std::int64_t K, int n_seeds,
                         std::uint64_t base_seed) {
    if (K <= 0 || K > sched.T) throw std::invalid_argument("lemma6_probe: need 0 < K <= T");
    if (n_seeds < 2) throw std::invalid_argument("lemma6_probe: need n_seeds >= 2");

    const std::size_t d = p.dim();
    const auto& sigma = p.sigma();
    const double sigma_s = p.sigma_s();
    const double beta = sched.beta;

    struct SeedOut {
        double lhs = 0.0;
        double grad_term = 0.0;
    };
    const std::vector<SeedOut> outs = parallel_map<SeedOut>(
        static_cast<std::size_t>(n_seeds), 0, [&](std::size_t s) {
            auto rng = make_stream(base_seed + s, Stream::gradient_noise);
            OptimizerState state = make_state(p.initial_point(), sched);
            SeedOut out;
            for (std::int64_t k = 1; k <= K; ++k) {
                const GradSample sample = p.sample_gradient(state.x, rng);
                for (std::size_t i = 0; i < d; ++i) {
                    const double gi = sample.exact[i];
                    const double wide_v =
                        beta * state.v[i] + (1.0 - beta) * (gi * gi + sigma[i] * sigma[i]);
                    out.lhs += std::sqrt(wide_v);
                    out.grad_term += gi * gi / std::sqrt(wide_v);
                }
                momentum_step(state, sample.g, sched);
            }
            return out;
        });

    const double max_term =
        std::max(static_cast<double>(K) * std::sqrt(static_cast<double>(d) * sigma_s * sigma_s),
                 std::sqrt(static_cast<double>(d) * static_cast<double>(sched.T)));
    std::vector<double> lhs_vals(outs.size());
    std::vector<double> rhs_vals(outs.size());
    std::vector<double> diffs(outs.size());
    for (std::size_t s = 0; s < outs.size(); ++s) {
        lhs_vals[s] = outs[s].lhs;
        rhs_vals[s] = max_term + 2.0 * outs[s].grad_term;
        diffs[s] = lhs_vals[s] - rhs_vals[s];
    }
    const Mean lhs = mean_and_se(lhs_vals);
    const Mean rhs = mean_and_se(rhs_vals);
    const Mean diff = mean_and_se(diffs);
    return make_probe_result("lemma6", lhs.mean, rhs.mean, 3.0 * diff.se);
}

std::vector<ProbeResult> equivalence_probe(const Problem& p, const Schedule& sched,
                                           std::int64_t steps, std::uint64_t seed) {
    if (steps <= 0) throw std::invalid_argument("equivalence_probe: steps must be positive");
    auto rng = make_stream(seed, Stream::gradient_noise);
    OptimizerState state = make_state(p.initial_point(), sched);
    std::vector<double> x_hb = state.x;
    std::vector<double> x_hb_prev = state.x;
    std::vector<double> v_hb = state.v;

    double worst_dev = 0.0;
    double worst_resid = 0.0;
    for (std::int64_t k = 1; k <= steps; ++k) {
        const GradSample sample = p.sample_gradient(state.x, rng);
        const std::vector<double> z_k = z_of(state.x, state.x_prev, sched.theta);

        momentum_step(state, sample.g, sched);

        update_v(v_hb, sample.g, sched.beta);
        std::vector<double> x_hb_next = heavy_ball_step(x_hb, x_hb_prev, v_hb, sample.g, sched);
        x_hb_prev = std::move(x_hb);
        x_hb = std::move(x_hb_next);

        const std::vector<double> z_next = z_of(state.x, state.x_prev, sched.theta);
        for (std::size_t i = 0; i < state.x.size(); ++i) {
            const double dev = std::abs(state.x[i] - x_hb[i]) /
                               std::max({std::abs(state.x[i]), std::abs(x_hb[i]), 1.0});
            worst_dev = std::max(worst_dev, dev);
            const double resid =
                z_next[i] - (z_k[i] - sched.eta * sample.g[i] / std::sqrt(state.v[i]));
            const double rel = std::abs(resid) /
                               std::max({std::abs(z_k[i]), std::abs(z_next[i]), 1.0});
            worst_resid = std::max(worst_resid, rel);
        }
    }
    return {make_probe_result("x_trajectory_agreement", worst_dev, 0.0, 1e-9),
            make_probe_result("z_recursion_residual", worst_resid, 0.0, 1e-9)};
}

std::vector<ProbeResult> assumption_probes(const Problem& p, const AssumptionProbeOptions& opt) {
    std::vector<ProbeResult> out;
    const std::size_t d = p.dim();
    const std::vector<double> x0 = p.initial_point();
    auto rng = make_stream(opt.seed, Stream::probe);

    // Assumption 1: gradient Lipschitz bound over random pairs. The toy MLP
    // is probed only inside the region its estimate was sampled from.
    {
        const double spread = p.kind() == Problem::Kind::toy_mlp ? 0.5 : 2.0;
        std::vector<double> xa(d), xb(d);
        double worst = 0.0;
        double worst_value_gap = 0.0;
        for (std::size_t t = 0; t < opt.lipschitz_pairs; ++t) {
            fill_gaussian(rng, xa);
            fill_gaussian(rng, xb);
            double dist2 = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                xa[i] = x0[i] + spread * xa[i];
                xb[i] = x0[i] + spread * xb[i];
                const double diff = xa[i] - xb[i];
                dist2 += diff * diff;
            }
            const std::vector<double> ga = p.gradient(xa);
            const std::vector<double> gb = p.gradient(xb);
            worst = std::max(worst, std::sqrt(diff_norm_sq(ga, gb) / dist2));
            worst_value_gap =
                std::max(worst_value_gap, p.f_star() - std::min(p.value(xa), p.value(xb)));
        }
        const double L = p.smoothness();
        out.push_back(make_probe_result("lipschitz_" + p.kind_name(), worst, L, 1e-9 * L));
        out.push_back(make_probe_result("value_above_infimum", worst_value_gap, 0.0, 0.0));
    }

    // Assumptions 2-3: sampler unbiasedness (5 standard errors per coordinate)
    // and, for the Gaussian-noise kinds, variance at most sigma_i^2 * 1.05.
    {
        const std::vector<double> exact = p.gradient(x0);
        const auto& sigma = p.sigma();
        std::vector<double> mean(d, 0.0);
        std::vector<double> m2(d, 0.0);
        const double n = static_cast<double>(opt.mc_samples);
        for (std::size_t t = 0; t < opt.mc_samples; ++t) {
            const GradSample s = p.sample_gradient(x0, rng);
            for (std::size_t i = 0; i < d; ++i) {
                const double delta = s.g[i] - mean[i];
                mean[i] += delta / static_cast<double>(t + 1);
                m2[i] += delta * (s.g[i] - mean[i]);
            }
        }
        const double sigma_max = *std::max_element(sigma.begin(), sigma.end());
        double worst_z = 0.0;
        double worst_exact_dev = 0.0;
        double worst_var_ratio = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            if (sigma[i] > 1e-12 * sigma_max) {
                worst_z = std::max(worst_z,
                                   std::abs(mean[i] - exact[i]) / (sigma[i] / std::sqrt(n)));
                worst_var_ratio =
                    std::max(worst_var_ratio, m2[i] / (n - 1.0) / (sigma[i] * sigma[i]));
            } else {
                worst_exact_dev = std::max(worst_exact_dev, std::abs(mean[i] - exact[i]));
            }
        }
        if (sigma_max > 0.0) {
            out.push_back(make_probe_result("unbiased_zscore", worst_z, 5.0, 0.0));
        }
        out.push_back(make_probe_result("unbiased_noiseless_coords", worst_exact_dev, 0.0, 0.0));
        if (p.kind() != Problem::Kind::toy_mlp && sigma_max > 0.0) {
            out.push_back(make_probe_result("variance_ratio", worst_var_ratio, 1.05, 0.0));
        }
    }

    // Stored aggregate sigma_s must equal the coordinate-order recomputation.
    {
        double acc = 0.0;
        for (double si : p.sigma()) acc += si * si;
        out.push_back(make_probe_result("sigma_s_consistency",
                                        std::abs(std::sqrt(acc) - p.sigma_s()), 0.0, 0.0));
    }

    // Bitwise determinism of the sampler at a fixed (problem, x, seed).
    {
        auto r1 = make_stream(opt.seed, Stream::gradient_noise);
        auto r2 = make_stream(opt.seed, Stream::gradient_noise);
        const GradSample a = p.sample_gradient(x0, r1);
        const GradSample b = p.sample_gradient(x0, r2);
        double mismatches = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            if (a.g[i] != b.g[i] || a.exact[i] != b.exact[i]) mismatches += 1.0;
        }
        out.push_back(make_probe_result("sampler_determinism", mismatches, 0.0, 0.0));
    }

    return out;
}

}  // namespace rmslab
