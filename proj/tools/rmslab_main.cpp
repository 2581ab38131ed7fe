#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "rmslab/config.hpp"
#include "rmslab/harness.hpp"
#include "rmslab/optimizer.hpp"
#include "rmslab/probes.hpp"
#include "rmslab/report.hpp"
#include "rmslab/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rmslab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitProbe = 3;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> jobs;
};

void apply(const Overrides& ov, Experiment& exp) {
    if (ov.seed) exp.base.seed = *ov.seed;
    if (ov.out_dir) exp.out_dir = *ov.out_dir;
    if (ov.jobs) exp.jobs = *ov.jobs;
}

std::vector<std::pair<double, double>> column(std::span<const IterRecord> recs,
                                              double IterRecord::* field) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(recs.size());
    for (const IterRecord& r : recs) {
        pts.emplace_back(static_cast<double>(r.k), r.*field);
    }
    return pts;
}

int cmd_run(const std::string& config_path, const Overrides& ov) {
    Experiment exp = load_experiment(config_path);
    apply(ov, exp);
    auto [x1, sched] = resolve_run(exp.base);
    (void)x1;

    const RunResult res = run(exp.base);

    const fs::path out(exp.out_dir);
    write_run_csv(out / "run.csv", res.records);
    write_text_file(out / "summary.json",
                    summary_to_json(res.summary, sched, exp.base.problem, exp.base.optimizer)
                            .dump(2) +
                        "\n");
    write_plot_data(out / "f.dat", column(res.records, &IterRecord::f_x));
    write_plot_data(out / "g1.dat", column(res.records, &IterRecord::g1));
    write_plot_data(out / "ratio.dat", column(res.records, &IterRecord::ratio));
    write_text_file(out / "plot_run.gp",
                    "# gnuplot stub for the per-iteration curves\n"
                    "set logscale y\n"
                    "set xlabel \"k\"\n"
                    "plot \"f.dat\" with lines title \"f(x^k)\", \\\n"
                    "     \"g1.dat\" with lines title \"||grad f||_1\"\n"
                    "pause -1\n");
    std::cout << "wrote " << (out / "run.csv").string() << ", summary.json, plot data ("
              << res.records.size() << " records)\n";
    return kExitOk;
}

int cmd_bound(const std::string& config_path) {
    Experiment exp = load_experiment(config_path);
    double f_gap = 0.0;
    auto [x1, sched] = resolve_run(exp.base, &f_gap);
    (void)x1;
    const Problem& p = exp.base.problem;
    const BoundReport bound =
        compute_F(sched, p.smoothness(), f_gap, p.sigma_s(), p.min_sigma_sq());

    json j;
    j["problem"] = json{{"kind", p.kind_name()},
                        {"dim", p.dim()},
                        {"L", p.smoothness()},
                        {"L_certified", p.smoothness_certified()},
                        {"f_star", p.f_star()},
                        {"sigma_s", p.sigma_s()}};
    j["schedule"] = schedule_to_json(sched);
    j["f_gap"] = f_gap;
    j["bound"] = bound_to_json(bound);
    if (f_gap > 0.0) {
        const CorollaryThresholds th =
            corollary_thresholds(p.smoothness(), f_gap, p.sigma_s(), sched.lambda);
        j["corollary"] = json{{"gamma_rule", corollary_gamma(p.smoothness(), f_gap)},
                              {"T_sharp_window", th.T_sharp_window},
                              {"T_noise_dominant", th.T_noise_dominant}};
    }
    j["sgd_reference"] = sgd_reference(p.smoothness(), f_gap, p.sigma_s(), sched.T);
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const Overrides& ov) {
    Experiment exp = load_experiment(config_path);
    apply(ov, exp);
    if (exp.t_grid.empty())
        throw ConfigError("sweep: config has no sweep.T_grid (empty grid)");

    const std::vector<TSweepRow> rows =
        t_sweep(exp.base, exp.t_grid, exp.n_seeds, exp.jobs);

    bool any_admissible = false;
    bool any_violation = false;
    std::vector<std::pair<double, double>> emp, bnd, bnd_noise, sgd;
    for (const TSweepRow& r : rows) {
        if (!r.admissible) {
            std::cerr << "skipped inadmissible T = " << r.T << "\n";
            continue;
        }
        any_admissible = true;
        any_violation = any_violation || r.violation;
        const double T = static_cast<double>(r.T);
        if (r.mean_avg_g1 > 0.0) emp.emplace_back(T, r.mean_avg_g1);
        bnd.emplace_back(T, r.bound_rhs);
        bnd_noise.emplace_back(T, r.term_noise);
        if (r.sgd_ref > 0.0) sgd.emplace_back(T, r.sgd_ref);
    }
    if (!any_admissible) throw ConfigError("sweep: no admissible T in grid");

    const fs::path out(exp.out_dir);
    write_sweep_csv(out / "sweep.csv", rows);
    write_plot_data(out / "empirical.dat", emp);
    write_plot_data(out / "bound.dat", bnd);
    write_plot_data(out / "bound_noise.dat", bnd_noise);
    write_plot_data(out / "sgd_ref.dat", sgd);

    json slopes;
    if (emp.size() >= 3) slopes["empirical"] = fit_to_json(fit_rate(emp));
    if (bnd.size() >= 3) slopes["bound_rhs"] = fit_to_json(fit_rate(bnd));
    if (bnd_noise.size() >= 3) slopes["bound_noise_term"] = fit_to_json(fit_rate(bnd_noise));
    if (sgd.size() >= 3) slopes["sgd_reference"] = fit_to_json(fit_rate(sgd));
    write_text_file(out / "slopes.json", slopes.dump(2) + "\n");
    write_text_file(out / "plot_sweep.gp",
                    "# gnuplot stub for the sweep curves\n"
                    "set logscale xy\n"
                    "set xlabel \"T\"\n"
                    "plot \"empirical.dat\" with linespoints title \"empirical\", \\\n"
                    "     \"bound.dat\" with lines title \"bound rhs\", \\\n"
                    "     \"sgd_ref.dat\" with lines title \"sgd reference\"\n"
                    "pause -1\n");

    for (const TSweepRow& r : rows) {
        if (r.violation) {
            std::cerr << "BOUND VIOLATION at T = " << r.T << ": mean " << r.mean_avg_g1
                      << " - 3*SE " << 3.0 * r.se << " > rhs " << r.bound_rhs << "\n";
        }
    }
    std::cout << "wrote " << (out / "sweep.csv").string() << " (" << rows.size()
              << " grid points)\n";
    return any_violation ? kExitRuntime : kExitOk;
}

struct VerifyOptions {
    int n = 1000;
    int len = 1000;
    std::int64_t steps = 10000;
    std::int64_t T = 1000;
    int seeds = 0;  // 0: per-suite default
    double theta = -1.0;  // <0: per-suite default
    std::uint64_t seed = 20240901;
    std::size_t samples = 100000;
};

Problem verify_quadratic(std::size_t d, double sigma) {
    std::vector<double> eig(d);
    for (std::size_t i = 0; i < d; ++i) {
        eig[i] = 0.1 + 0.9 * static_cast<double>(i) / static_cast<double>(d - 1);
    }
    return make_quadratic(d, eig, std::vector<double>(d, sigma));
}

Schedule verify_schedule(const Problem& p, double theta, std::int64_t T) {
    const std::vector<double> x1(p.dim(), 1.0);
    const double f_gap = p.value(x1) - p.f_star();
    return derive_schedule(corollary_gamma(p.smoothness(), f_gap), 1.0, theta, T, p.dim(),
                           p.sigma());
}

void suite_lemma1(const VerifyOptions& opt, std::vector<ProbeResult>& out) {
    const double betas[] = {0.9, 0.99, 0.999};
    const double v0s[] = {1e-4, 1.0};
    const double scales[] = {0.03, 1.0, 30.0};
    auto rng = make_stream(opt.seed, Stream::probe);
    std::vector<double> g(static_cast<std::size_t>(opt.len));
    int case_idx = 0;
    for (double beta : betas) {
        for (double v0 : v0s) {
            ProbeResult worst;
            worst.margin = std::numeric_limits<double>::infinity();
            const int reps = std::max(1, (opt.n + 5) / 6);
            for (int r = 0; r < reps; ++r) {
                fill_gaussian(rng, g);
                const double scale = scales[case_idx++ % 3];
                for (double& gi : g) gi *= scale;
                ProbeResult pr = lemma1_probe(g, v0, beta);
                if (pr.margin < worst.margin) worst = pr;
            }
            char name[64];
            std::snprintf(name, sizeof(name), "lemma1_beta%g_v0%g", beta, v0);
            worst.name = name;
            out.push_back(worst);
        }
    }
}

void suite_lemma2(const VerifyOptions& opt, std::vector<ProbeResult>& out) {
    const Problem p = verify_quadratic(10, 0.3);
    const int seeds = opt.seeds > 0 ? opt.seeds : 20;
    std::vector<double> thetas = opt.theta >= 0.0 ? std::vector<double>{opt.theta}
                                                  : std::vector<double>{0.0, 0.9};
    for (double theta : thetas) {
        const Schedule sched = verify_schedule(p, theta, opt.T);
        std::vector<ProbeResult> worst;
        for (int s = 0; s < seeds; ++s) {
            const auto traj = record_momentum_trajectory(p, sched, opt.T, opt.seed + s);
            std::vector<ProbeResult> probes = lemma2_probe(traj, p, sched);
            if (worst.empty()) {
                worst = std::move(probes);
            } else {
                for (std::size_t i = 0; i < worst.size(); ++i) {
                    if (probes[i].margin < worst[i].margin) worst[i] = probes[i];
                }
            }
        }
        for (ProbeResult& pr : worst) {
            pr.name += "_theta" + std::to_string(theta).substr(0, 3);
            out.push_back(pr);
        }
    }
}

void suite_lemma6(const VerifyOptions& opt, std::vector<ProbeResult>& out) {
    const Problem p = verify_quadratic(10, 0.3);
    const Schedule sched = verify_schedule(p, opt.theta >= 0.0 ? opt.theta : 0.0, opt.T);
    const int seeds = opt.seeds > 0 ? opt.seeds : 50;
    out.push_back(lemma6_probe(p, sched, opt.T, seeds, opt.seed));
}

void suite_equivalence(const VerifyOptions& opt, std::vector<ProbeResult>& out) {
    const Problem p = verify_quadratic(100, 0.3);
    const double theta = opt.theta >= 0.0 ? opt.theta : 0.9;
    const Schedule sched = verify_schedule(p, theta, opt.steps);
    for (ProbeResult& pr : equivalence_probe(p, sched, opt.steps, opt.seed)) {
        out.push_back(std::move(pr));
    }
}

void suite_assumptions(const VerifyOptions& opt, std::vector<ProbeResult>& out) {
    AssumptionProbeOptions a;
    a.mc_samples = opt.samples;
    a.seed = opt.seed;
    for (ProbeResult& pr : assumption_probes(verify_quadratic(10, 0.3), a)) {
        pr.name = "quadratic." + pr.name;
        out.push_back(std::move(pr));
    }
    for (ProbeResult& pr :
         assumption_probes(make_smoothed_nonconvex(10, 1.0, std::vector<double>(10, 0.5)), a)) {
        pr.name = "smoothed." + pr.name;
        out.push_back(std::move(pr));
    }
    AssumptionProbeOptions am = a;
    am.mc_samples = std::min<std::size_t>(a.mc_samples, 20000);
    for (ProbeResult& pr : assumption_probes(make_toy_mlp(8, 16, 128, 7, 16), am)) {
        pr.name = "toy_mlp." + pr.name;
        out.push_back(std::move(pr));
    }
}

void suite_identities(const VerifyOptions& opt, std::vector<ProbeResult>& out) {
    for (std::int64_t T : {10, 100, 1000, 10000}) out.push_back(beta_floor_probe(T));
    auto rng = make_stream(opt.seed, Stream::probe);
    std::vector<double> xs(10000);
    for (double& x : xs) x = -10.0 + 10.999 * rng.next_unit();
    out.push_back(log_inequality_probe(xs));
}

int cmd_verify(const std::string& suite, const VerifyOptions& opt) {
    std::vector<ProbeResult> probes;
    if (suite == "lemma1") {
        suite_lemma1(opt, probes);
    } else if (suite == "lemma2") {
        suite_lemma2(opt, probes);
    } else if (suite == "lemma6") {
        suite_lemma6(opt, probes);
    } else if (suite == "equivalence") {
        suite_equivalence(opt, probes);
    } else if (suite == "assumptions") {
        suite_assumptions(opt, probes);
    } else if (suite == "all") {
        suite_lemma1(opt, probes);
        suite_lemma2(opt, probes);
        suite_lemma6(opt, probes);
        suite_equivalence(opt, probes);
        suite_assumptions(opt, probes);
        suite_identities(opt, probes);
    } else {
        throw ConfigError("verify: unknown suite \"" + suite +
                          "\" (lemma1|lemma2|lemma6|equivalence|assumptions|all)");
    }
    std::cout << render_probe_table(probes);
    int failures = 0;
    for (const ProbeResult& p : probes) {
        if (!p.passed) ++failures;
    }
    if (failures > 0) {
        std::cerr << failures << " probe(s) failed\n";
        return kExitProbe;
    }
    std::cout << probes.size() << " probe(s) passed\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RMSProp laboratory: runs, bound evaluation, and inequality probes"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed_flag = 0;
    std::string out_dir_flag;
    int jobs_flag = 0;

    auto add_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed_flag, "override the config seed");
        cmd->add_option("--out-dir", out_dir_flag, "override the output directory");
        cmd->add_option("--jobs", jobs_flag, "worker threads for sweeps (0 = auto)");
    };
    auto overrides_of = [&](CLI::App* cmd) {
        Overrides ov;
        if (cmd->count("--seed") > 0) ov.seed = seed_flag;
        if (cmd->count("--out-dir") > 0) ov.out_dir = out_dir_flag;
        if (cmd->count("--jobs") > 0) ov.jobs = jobs_flag;
        return ov;
    };

    CLI::App* c_run = app.add_subcommand("run", "run one trajectory and write its artifacts");
    c_run->add_option("config", config_path, "experiment file (JSON)")->required();
    add_overrides(c_run);

    CLI::App* c_bound = app.add_subcommand("bound", "print the bound report without running");
    c_bound->add_option("config", config_path, "experiment file (JSON)")->required();

    CLI::App* c_sweep = app.add_subcommand("sweep", "seed-averaged sweep over the T grid");
    c_sweep->add_option("config", config_path, "experiment file (JSON)")->required();
    add_overrides(c_sweep);

    std::string suite;
    VerifyOptions vopt;
    CLI::App* c_verify = app.add_subcommand("verify", "run inequality probe suites");
    c_verify->add_option("suite", suite, "lemma1|lemma2|lemma6|equivalence|assumptions|all")
        ->required();
    c_verify->add_option("--n", vopt.n, "number of random sequences (lemma1)");
    c_verify->add_option("--len", vopt.len, "sequence length (lemma1)");
    c_verify->add_option("--steps", vopt.steps, "trajectory length (equivalence)");
    c_verify->add_option("--T", vopt.T, "iteration budget (lemma2/lemma6)");
    c_verify->add_option("--seeds", vopt.seeds, "Monte-Carlo seed count");
    c_verify->add_option("--theta", vopt.theta, "momentum parameter");
    c_verify->add_option("--seed", vopt.seed, "base seed");
    c_verify->add_option("--samples", vopt.samples, "Monte-Carlo samples (assumptions)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed()) return cmd_run(config_path, overrides_of(c_run));
        if (c_bound->parsed()) return cmd_bound(config_path);
        if (c_sweep->parsed()) return cmd_sweep(config_path, overrides_of(c_sweep));
        if (c_verify->parsed()) return cmd_verify(suite, vopt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const RunAbortError& e) {
        std::cerr << "runtime abort: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
