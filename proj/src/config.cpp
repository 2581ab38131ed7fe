#include "rmslab/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace rmslab {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.contains(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
}

double get_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return j.at(key).get<double>();
}

double get_number_or(const json& j, const std::string& key, double fallback,
                     const std::string& where) {
    if (!j.contains(key)) return fallback;
    return get_number(j, key, where);
}

std::int64_t get_int(const json& j, const std::string& key, const std::string& where) {
    if (!j.at(key).is_number_integer())
        throw ConfigError(where + "." + key + ": expected an integer");
    return j.at(key).get<std::int64_t>();
}

std::int64_t get_int_or(const json& j, const std::string& key, std::int64_t fallback,
                        const std::string& where) {
    if (!j.contains(key)) return fallback;
    return get_int(j, key, where);
}

// Size-like fields: positive and small enough that a bad config cannot ask
// for a gigabyte of coordinates.
std::size_t get_size(const json& j, const std::string& key, const std::string& where) {
    const std::int64_t v = get_int(j, key, where);
    if (v <= 0 || v > 10'000'000)
        throw ConfigError(where + "." + key + ": must be in [1, 10^7]");
    return static_cast<std::size_t>(v);
}

std::vector<double> parse_coordinate_field(const json& j, std::size_t dim,
                                           const std::string& where) {
    // A scalar broadcasts; an array gives every coordinate; {"linspace":
    // [lo, hi]} yields dim evenly spaced values.
    if (j.is_number()) return std::vector<double>(dim, j.get<double>());
    if (j.is_array()) {
        std::vector<double> out = j.get<std::vector<double>>();
        if (out.size() != dim)
            throw ConfigError(where + ": array must have length dim = " + std::to_string(dim));
        return out;
    }
    if (j.is_object()) {
        reject_unknown_keys(j, {"linspace"}, where);
        const auto& ls = j.at("linspace");
        if (!ls.is_array() || ls.size() != 2)
            throw ConfigError(where + ".linspace: expected [lo, hi]");
        const double lo = ls[0].get<double>();
        const double hi = ls[1].get<double>();
        std::vector<double> out(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            out[i] = dim == 1 ? hi
                              : lo + (hi - lo) * static_cast<double>(i) /
                                         static_cast<double>(dim - 1);
        }
        return out;
    }
    throw ConfigError(where + ": expected number, array, or {\"linspace\": [lo, hi]}");
}

}  // namespace

ProblemSpec parse_problem_spec(const json& j) {
    require_object(j, "problem");
    ProblemSpec spec;
    if (!j.contains("kind")) throw ConfigError("problem: missing \"kind\"");
    spec.kind = j.at("kind").get<std::string>();

    if (spec.kind == "quadratic") {
        reject_unknown_keys(j, {"kind", "dim", "eigenvalues", "sigma"}, "problem");
        spec.dim = get_size(j, "dim", "problem");
        if (!j.contains("eigenvalues")) throw ConfigError("problem: missing \"eigenvalues\"");
        spec.eigenvalues =
            parse_coordinate_field(j.at("eigenvalues"), spec.dim, "problem.eigenvalues");
        if (j.contains("sigma"))
            spec.sigma = parse_coordinate_field(j.at("sigma"), spec.dim, "problem.sigma");
    } else if (spec.kind == "smoothed-nonconvex") {
        reject_unknown_keys(j, {"kind", "dim", "scale", "sigma"}, "problem");
        spec.dim = get_size(j, "dim", "problem");
        spec.scale = get_number(j, "scale", "problem");
        if (j.contains("sigma"))
            spec.sigma = parse_coordinate_field(j.at("sigma"), spec.dim, "problem.sigma");
    } else if (spec.kind == "toy-mlp") {
        reject_unknown_keys(
            j, {"kind", "in_dim", "hidden", "n_data", "seed", "batch", "target_scale"},
            "problem");
        spec.in_dim = get_size(j, "in_dim", "problem");
        spec.hidden = get_size(j, "hidden", "problem");
        spec.n_data = get_size(j, "n_data", "problem");
        spec.mlp_seed = static_cast<std::uint64_t>(get_int_or(j, "seed", 1, "problem"));
        if (j.contains("batch")) spec.batch = get_size(j, "batch", "problem");
        spec.target_scale = get_number_or(j, "target_scale", 1.0, "problem");
        spec.dim = spec.hidden * (spec.in_dim + 2) + 1;
    } else {
        throw ConfigError("problem.kind: unknown kind \"" + spec.kind + "\"");
    }
    return spec;
}

json problem_spec_to_json(const ProblemSpec& spec) {
    json j;
    j["kind"] = spec.kind;
    if (spec.kind == "quadratic") {
        j["dim"] = spec.dim;
        j["eigenvalues"] = spec.eigenvalues;
        if (!spec.sigma.empty()) j["sigma"] = spec.sigma;
    } else if (spec.kind == "smoothed-nonconvex") {
        j["dim"] = spec.dim;
        j["scale"] = spec.scale;
        if (!spec.sigma.empty()) j["sigma"] = spec.sigma;
    } else {
        j["in_dim"] = spec.in_dim;
        j["hidden"] = spec.hidden;
        j["n_data"] = spec.n_data;
        j["seed"] = spec.mlp_seed;
        if (spec.batch != 0) j["batch"] = spec.batch;
        if (spec.target_scale != 1.0) j["target_scale"] = spec.target_scale;
    }
    return j;
}

Problem make_problem(const ProblemSpec& spec) {
    try {
        if (spec.kind == "quadratic") {
            return make_quadratic(spec.dim, spec.eigenvalues, spec.sigma);
        }
        if (spec.kind == "smoothed-nonconvex") {
            return make_smoothed_nonconvex(spec.dim, spec.scale, spec.sigma);
        }
        return make_toy_mlp(spec.in_dim, spec.hidden, spec.n_data, spec.mlp_seed, spec.batch,
                            spec.target_scale);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("problem: ") + e.what());
    }
}

namespace {

ScheduleSpec parse_schedule_spec(const json& j) {
    require_object(j, "schedule");
    reject_unknown_keys(j, {"gamma", "lambda", "theta", "T"}, "schedule");
    ScheduleSpec s;
    if (!j.contains("gamma")) throw ConfigError("schedule: missing \"gamma\"");
    const auto& g = j.at("gamma");
    if (g.is_string()) {
        if (g.get<std::string>() != "corollary")
            throw ConfigError("schedule.gamma: expected a number or \"corollary\"");
        s.gamma_from_corollary = true;
    } else if (g.is_number()) {
        s.gamma = g.get<double>();
    } else {
        throw ConfigError("schedule.gamma: expected a number or \"corollary\"");
    }
    s.lambda = get_number_or(j, "lambda", 1.0, "schedule");
    s.theta = get_number_or(j, "theta", 0.0, "schedule");
    s.T = get_int(j, "T", "schedule");
    return s;
}

InitSpec parse_init_spec(const json& j) {
    require_object(j, "init");
    reject_unknown_keys(j, {"kind", "scale", "values"}, "init");
    InitSpec s;
    const std::string kind = j.contains("kind") ? j.at("kind").get<std::string>() : "default";
    if (kind == "default") {
        s.kind = InitSpec::Kind::problem_default;
    } else if (kind == "ones") {
        s.kind = InitSpec::Kind::ones;
    } else if (kind == "zeros") {
        s.kind = InitSpec::Kind::zeros;
    } else if (kind == "explicit") {
        s.kind = InitSpec::Kind::explicit_values;
        if (!j.contains("values")) throw ConfigError("init: explicit kind needs \"values\"");
        s.values = j.at("values").get<std::vector<double>>();
    } else {
        throw ConfigError("init.kind: unknown kind \"" + kind + "\"");
    }
    s.scale = get_number_or(j, "scale", 1.0, "init");
    return s;
}

OptimizerKind parse_optimizer(const json& j) {
    const std::string name = j.get<std::string>();
    if (name == "rmsprop") return OptimizerKind::rmsprop;
    if (name == "rmsprop_momentum") return OptimizerKind::rmsprop_momentum;
    if (name == "sgd") return OptimizerKind::sgd;
    throw ConfigError("optimizer: unknown optimizer \"" + name + "\"");
}

}  // namespace

Experiment parse_experiment(const json& j) {
    require_object(j, "config");
    reject_unknown_keys(j,
                        {"problem", "schedule", "optimizer", "seed", "seeds", "record_every",
                         "init", "sweep", "out_dir", "jobs"},
                        "config");
    if (!j.contains("problem")) throw ConfigError("config: missing \"problem\"");
    if (!j.contains("schedule")) throw ConfigError("config: missing \"schedule\"");

    ProblemSpec spec = parse_problem_spec(j.at("problem"));
    RunConfig cfg{make_problem(spec), parse_schedule_spec(j.at("schedule")),
                  OptimizerKind::rmsprop, 1, 1, InitSpec{}};
    if (j.contains("optimizer")) cfg.optimizer = parse_optimizer(j.at("optimizer"));
    cfg.seed = static_cast<std::uint64_t>(get_int_or(j, "seed", 1, "config"));
    cfg.record_every = get_int_or(j, "record_every", 1, "config");
    if (cfg.record_every <= 0) throw ConfigError("record_every: must be positive");
    if (j.contains("init")) cfg.init = parse_init_spec(j.at("init"));

    const int n_seeds = static_cast<int>(get_int_or(j, "seeds", 8, "config"));
    if (n_seeds < 2) throw ConfigError("seeds: must be >= 2");
    std::string out_dir = j.contains("out_dir") ? j.at("out_dir").get<std::string>() : "out";
    const int jobs = static_cast<int>(get_int_or(j, "jobs", 0, "config"));

    std::vector<std::int64_t> t_grid;
    if (j.contains("sweep")) {
        const auto& sw = j.at("sweep");
        require_object(sw, "sweep");
        reject_unknown_keys(sw, {"T_grid"}, "sweep");
        if (!sw.contains("T_grid")) throw ConfigError("sweep: missing \"T_grid\"");
        t_grid = sw.at("T_grid").get<std::vector<std::int64_t>>();
        if (t_grid.empty()) throw ConfigError("sweep.T_grid: must be non-empty");
        if (!std::is_sorted(t_grid.begin(), t_grid.end()))
            throw ConfigError("sweep.T_grid: must be sorted ascending");
    }

    Experiment exp{std::move(spec), std::move(cfg),      n_seeds,
                   std::move(t_grid), std::move(out_dir), jobs};

    // Validate the physical fields up front: initial point, corollary gamma,
    // and the derived schedule must all be constructible before any run.
    try {
        resolve_run(exp.base);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("schedule: ") + e.what());
    }
    return exp;
}

Experiment load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    return parse_experiment(j);
}

}  // namespace rmslab
