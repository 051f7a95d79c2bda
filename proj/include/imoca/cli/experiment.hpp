#ifndef IMOCA_CLI_EXPERIMENT_HPP
#define IMOCA_CLI_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "imoca/engine/engine.hpp"

namespace imoca::cli {

// exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitRunFailure = 1;
inline constexpr int kExitConfigError = 2;

struct ExperimentSpec {
  std::string output_dir = "results";
  std::vector<engine::RunConfig> runs;  // one per (problem, method, seed)
};

// Line-oriented spec: versioned header, optional "output,<dir>" directive,
// then rows "problem,method,seeds,budget[,key=value;key=value...]" where
// seeds is "a..b" or a space-separated list. IMOCA_OUTPUT_ROOT prefixes a
// relative output dir.
ExperimentSpec parse_spec_file(const std::string& path);

int cmd_run(const std::string& spec_path, bool force, int jobs);
int cmd_summarize(const std::string& output_dir);
int cmd_selftest();

// Aggregation used by summarize: 50 evenly spaced cost checkpoints with
// step interpolation (last value carried forward).
struct AggregateCurve {
  std::vector<double> cost;
  std::vector<double> phv_mean, phv_var;
  std::vector<double> r2_mean, r2_var;
};

AggregateCurve aggregate_traces(const std::vector<engine::RunTrace>& traces,
                                double cost_max, int checkpoints = 50);

}  // namespace imoca::cli

#endif
