#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rmslab/harness.hpp"
#include "rmslab/problem.hpp"

namespace rmslab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Declarative problem descriptor, round-trippable to the config format.
struct ProblemSpec {
    std::string kind;  // "quadratic" | "smoothed-nonconvex" | "toy-mlp"
    std::size_t dim = 0;
    std::vector<double> eigenvalues;
    std::vector<double> sigma;
    double scale = 1.0;
    std::size_t in_dim = 0;
    std::size_t hidden = 0;
    std::size_t n_data = 0;
    std::uint64_t mlp_seed = 1;
    std::size_t batch = 0;
    double target_scale = 1.0;
};

Problem make_problem(const ProblemSpec& spec);
ProblemSpec parse_problem_spec(const nlohmann::json& j);
nlohmann::json problem_spec_to_json(const ProblemSpec& spec);

/// One experiment file: base run config plus sweep axes and output options.
struct Experiment {
    ProblemSpec problem_spec;
    RunConfig base;
    int n_seeds = 8;
    std::vector<std::int64_t> t_grid;  // empty when no sweep section
    std::string out_dir = "out";
    int jobs = 0;
};

/// Parses and validates: unknown keys are rejected at every level, and the
/// problem constructor plus derive_schedule run before this returns, so a
/// loaded experiment is runnable.
Experiment parse_experiment(const nlohmann::json& j);
Experiment load_experiment(const std::filesystem::path& path);

}  // namespace rmslab
