#include "rmslab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmslab/optimizer.hpp"
#include "rmslab/parallel.hpp"

namespace rmslab {

std::string optimizer_name(OptimizerKind k) {
    switch (k) {
        case OptimizerKind::rmsprop: return "rmsprop";
        case OptimizerKind::rmsprop_momentum: return "rmsprop_momentum";
        case OptimizerKind::sgd: return "sgd";
    }
    return "?";
}

namespace {

std::vector<double> initial_point_for(const RunConfig& cfg) {
    const std::size_t d = cfg.problem.dim();
    std::vector<double> x;
    switch (cfg.init.kind) {
        case InitSpec::Kind::problem_default: x = cfg.problem.initial_point(); break;
        case InitSpec::Kind::ones: x.assign(d, 1.0); break;
        case InitSpec::Kind::zeros: x.assign(d, 0.0); break;
        case InitSpec::Kind::explicit_values:
            if (cfg.init.values.size() != d)
                throw std::invalid_argument("init: explicit values must have length d");
            x = cfg.init.values;
            break;
    }
    if (cfg.init.scale != 1.0) {
        for (double& xi : x) xi *= cfg.init.scale;
    }
    return x;
}

}  // namespace

std::pair<std::vector<double>, Schedule> resolve_run(const RunConfig& cfg, double* f_gap_out) {
    std::vector<double> x1 = initial_point_for(cfg);
    const double f1 = cfg.problem.value(x1);
    if (!std::isfinite(f1))
        throw std::invalid_argument("resolve_run: f(x^1) is not finite");
    const double f_gap = f1 - cfg.problem.f_star();
    double gamma = cfg.schedule.gamma;
    if (cfg.schedule.gamma_from_corollary) {
        gamma = corollary_gamma(cfg.problem.smoothness(), f_gap);
    }
    Schedule sched = derive_schedule(gamma, cfg.schedule.lambda, cfg.schedule.theta,
                                     cfg.schedule.T, cfg.problem.dim(), cfg.problem.sigma());
    if (f_gap_out != nullptr) *f_gap_out = f_gap;
    return {std::move(x1), std::move(sched)};
}

RunResult run(const RunConfig& cfg) {
    if (cfg.record_every <= 0)
        throw std::invalid_argument("run: record_every must be positive");

    double f_gap = 0.0;
    auto [x1, sched] = resolve_run(cfg, &f_gap);
    const Problem& p = cfg.problem;
    const std::int64_t T = sched.T;

    RunResult out;
    out.summary.seed = cfg.seed;
    out.summary.f1 = p.value(x1);
    out.summary.f_gap = f_gap;
    out.summary.bound = compute_F(sched, p.smoothness(), f_gap, p.sigma_s(), p.min_sigma_sq());

    const double eta_sgd = std::min(1.0 / p.smoothness(),
                                    sched.gamma / std::sqrt(static_cast<double>(T)));

    OptimizerState state = make_state(std::move(x1), sched);
    auto rng = make_stream(cfg.seed, Stream::gradient_noise);

    const double sqrt_d = std::sqrt(static_cast<double>(p.dim()));
    double sum_g1 = 0.0;
    double sum_g2 = 0.0;
    double min_f = std::numeric_limits<double>::infinity();
    double f_k = 0.0;

    out.records.reserve(static_cast<std::size_t>(T / cfg.record_every + 1));
    for (std::int64_t k = 1; k <= T; ++k) {
        f_k = p.value(state.x);
        if (!std::isfinite(f_k)) throw RunAbortError(cfg.seed, k, "non-finite objective");
        min_f = std::min(min_f, f_k);

        const GradSample sample = p.sample_gradient(state.x, rng);
        double g1 = 0.0;
        double g2 = 0.0;
        for (double gi : sample.exact) {
            if (!std::isfinite(gi)) throw RunAbortError(cfg.seed, k, "non-finite gradient");
            g1 += std::abs(gi);
            g2 += gi * gi;
        }
        g2 = std::sqrt(g2);
        sum_g1 += g1;
        sum_g2 += g2;

        switch (cfg.optimizer) {
            case OptimizerKind::rmsprop: rmsprop_step(state, sample.g, sched); break;
            case OptimizerKind::rmsprop_momentum: momentum_step(state, sample.g, sched); break;
            case OptimizerKind::sgd: sgd_step(state, sample.g, eta_sgd); break;
        }

        if (k % cfg.record_every == 0 || k == T) {
            IterRecord rec;
            rec.k = k;
            rec.f_x = f_k;
            rec.g1 = g1;
            rec.g2 = g2;
            rec.ratio = g2 > 0.0 ? g1 / (sqrt_d * g2)
                                 : std::numeric_limits<double>::quiet_NaN();
            const auto [mn, mx] = std::minmax_element(state.v.begin(), state.v.end());
            rec.v_min = *mn;
            rec.v_max = *mx;
            out.records.push_back(rec);
        }
    }

    out.summary.avg_g1 = sum_g1 / static_cast<double>(T);
    out.summary.avg_g2 = sum_g2 / static_cast<double>(T);
    out.summary.min_f = min_f;
    out.summary.final_f = p.value(state.x);
    return out;
}

SweepStats seed_sweep(const RunConfig& cfg, int n_seeds, int jobs) {
    if (n_seeds < 2) throw std::invalid_argument("seed_sweep: need n_seeds >= 2");
    const std::vector<double> vals = parallel_map<double>(
        static_cast<std::size_t>(n_seeds), jobs, [&](std::size_t i) {
            RunConfig c = cfg;
            c.seed = cfg.seed + i;
            return run(c).summary.avg_g1;
        });
    SweepStats st;
    st.per_seed = vals;
    for (double v : vals) st.mean += v;
    st.mean /= static_cast<double>(n_seeds);
    double ss = 0.0;
    for (double v : vals) ss += (v - st.mean) * (v - st.mean);
    st.se = std::sqrt(ss / static_cast<double>(n_seeds - 1)) /
            std::sqrt(static_cast<double>(n_seeds));
    return st;
}

std::vector<TSweepRow> t_sweep(const RunConfig& cfg, std::span<const std::int64_t> t_grid,
                               int n_seeds, int jobs) {
    std::vector<TSweepRow> rows;
    rows.reserve(t_grid.size());
    for (std::int64_t T : t_grid) {
        TSweepRow row;
        row.T = T;
        RunConfig c = cfg;
        c.schedule.T = T;
        double f_gap = 0.0;
        Schedule sched;
        try {
            std::tie(std::ignore, sched) = resolve_run(c, &f_gap);
        } catch (const std::invalid_argument&) {
            row.admissible = false;  // skip-and-flag
            rows.push_back(row);
            continue;
        }
        row.admissible = true;
        const SweepStats st = seed_sweep(c, n_seeds, jobs);
        row.mean_avg_g1 = st.mean;
        row.se = st.se;
        const Problem& p = cfg.problem;
        const BoundReport b =
            compute_F(sched, p.smoothness(), f_gap, p.sigma_s(), p.min_sigma_sq());
        row.bound_rhs = b.rhs;
        row.term_noise = b.term_noise;
        row.term_det = b.term_det;
        row.sgd_ref = sgd_reference(p.smoothness(), f_gap, p.sigma_s(), T);
        row.violation = st.mean - 3.0 * st.se > b.rhs;
        rows.push_back(row);
    }
    return rows;
}

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [t, v] : points) {
        if (!(t > 0.0) || !(v > 0.0))
            throw std::invalid_argument("fit_rate: points must be positive");
        mx += std::log(t);
        my += std::log(v);
    }
    const double n = static_cast<double>(points.size());
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [t, v] : points) {
        const double dx = std::log(t) - mx;
        const double dy = std::log(v) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_rate: degenerate abscissae");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ss_res = syy - sxy * sxy / sxx;
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

}  // namespace rmslab
