#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rmslab/harness.hpp"
#include "rmslab/probes.hpp"
#include "rmslab/theory.hpp"

namespace rmslab {

/// Shortest exact decimal form (%.17g); shared by every text artifact so
/// reruns are byte-identical.
std::string format_double(double v);

/// Header "k,f,g1,g2,ratio,v_min,v_max".
extern const char* const kRunCsvHeader;
/// Header "T,admissible,mean_g1,se_g1,bound_rhs,term_noise,term_det,sgd_ref,violation".
extern const char* const kSweepCsvHeader;

void write_run_csv(const std::filesystem::path& path, std::span<const IterRecord> records);
void write_sweep_csv(const std::filesystem::path& path, std::span<const TSweepRow> rows);

/// Two columns, whitespace separated, one row per point.
void write_plot_data(const std::filesystem::path& path,
                     std::span<const std::pair<double, double>> points);
void write_text_file(const std::filesystem::path& path, const std::string& content);

nlohmann::json schedule_to_json(const Schedule& sched);
nlohmann::json bound_to_json(const BoundReport& bound);
nlohmann::json summary_to_json(const RunSummary& summary, const Schedule& sched,
                               const Problem& problem, OptimizerKind optimizer);
nlohmann::json fit_to_json(const RateFit& fit);
nlohmann::json probe_to_json(const ProbeResult& probe);

/// Fixed-width pass/fail table with one row per probe.
std::string render_probe_table(std::span<const ProbeResult> probes);

}  // namespace rmslab
