#include "rmslab/report.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace rmslab {

using nlohmann::json;

const char* const kRunCsvHeader = "k,f,g1,g2,ratio,v_min,v_max";
const char* const kSweepCsvHeader =
    "T,admissible,mean_g1,se_g1,bound_rhs,term_noise,term_det,sgd_ref,violation";

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

void write_run_csv(const std::filesystem::path& path, std::span<const IterRecord> records) {
    std::ofstream out = open_out(path);
    out << kRunCsvHeader << '\n';
    for (const IterRecord& r : records) {
        out << r.k << ',' << format_double(r.f_x) << ',' << format_double(r.g1) << ','
            << format_double(r.g2) << ',' << format_double(r.ratio) << ','
            << format_double(r.v_min) << ',' << format_double(r.v_max) << '\n';
    }
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const TSweepRow> rows) {
    std::ofstream out = open_out(path);
    out << kSweepCsvHeader << '\n';
    for (const TSweepRow& r : rows) {
        out << r.T << ',' << (r.admissible ? 1 : 0) << ',' << format_double(r.mean_avg_g1)
            << ',' << format_double(r.se) << ',' << format_double(r.bound_rhs) << ','
            << format_double(r.term_noise) << ',' << format_double(r.term_det) << ','
            << format_double(r.sgd_ref) << ',' << (r.violation ? 1 : 0) << '\n';
    }
}

void write_plot_data(const std::filesystem::path& path,
                     std::span<const std::pair<double, double>> points) {
    std::ofstream out = open_out(path);
    for (const auto& [x, y] : points) {
        out << format_double(x) << ' ' << format_double(y) << '\n';
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    open_out(path) << content;
}

json schedule_to_json(const Schedule& sched) {
    return json{{"gamma", sched.gamma}, {"lambda", sched.lambda}, {"theta", sched.theta},
                {"T", sched.T},         {"d", sched.dim},         {"eta", sched.eta},
                {"beta", sched.beta},   {"sigma_s", sched.sigma_s()}};
}

json bound_to_json(const BoundReport& b) {
    return json{{"F", b.F},
                {"F_over_gamma", b.F / b.gamma},
                {"branch_smooth", b.branch_smooth},
                {"branch_gap", b.branch_gap},
                {"branch_noise", b.branch_noise},
                {"branch_log", b.branch_log},
                {"term_noise", b.term_noise},
                {"term_det", b.term_det},
                {"rhs", b.rhs},
                {"dominant", regime_name(b.dominant)}};
}

json summary_to_json(const RunSummary& summary, const Schedule& sched, const Problem& problem,
                     OptimizerKind optimizer) {
    json j;
    j["seed"] = summary.seed;
    j["optimizer"] = optimizer_name(optimizer);
    j["problem"] = json{{"kind", problem.kind_name()},
                        {"dim", problem.dim()},
                        {"L", problem.smoothness()},
                        {"L_certified", problem.smoothness_certified()},
                        {"f_star", problem.f_star()},
                        {"sigma_s", problem.sigma_s()}};
    j["schedule"] = schedule_to_json(sched);
    j["metrics"] = json{{"avg_g1", summary.avg_g1}, {"avg_g2", summary.avg_g2},
                        {"min_f", summary.min_f},   {"final_f", summary.final_f},
                        {"f1", summary.f1},         {"f_gap", summary.f_gap}};
    j["bound"] = bound_to_json(summary.bound);
    return j;
}

json fit_to_json(const RateFit& fit) {
    return json{{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
}

json probe_to_json(const ProbeResult& p) {
    return json{{"name", p.name},     {"lhs", p.lhs},
                {"rhs", p.rhs},       {"margin", p.margin},
                {"tolerance", p.tolerance}, {"passed", p.passed}};
}

std::string render_probe_table(std::span<const ProbeResult> probes) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-32s %14s %14s %14s %10s %s\n", "probe", "lhs", "rhs",
                  "margin", "tol", "result");
    out += line;
    for (const ProbeResult& p : probes) {
        std::snprintf(line, sizeof(line), "%-32s %14.6g %14.6g %14.6g %10.3g %s\n",
                      p.name.c_str(), p.lhs, p.rhs, p.margin, p.tolerance,
                      p.passed ? "pass" : "FAIL");
        out += line;
    }
    return out;
}

}  // namespace rmslab
