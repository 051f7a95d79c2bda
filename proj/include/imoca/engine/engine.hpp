#ifndef IMOCA_ENGINE_ENGINE_HPP
#define IMOCA_ENGINE_ENGINE_HPP

#include <string>
#include <vector>

#include "imoca/acquisition/scores.hpp"
#include "imoca/benchmarks/problems.hpp"
#include "imoca/benchmarks/reference.hpp"
#include "imoca/cfgp/hyperfit.hpp"
#include "imoca/metrics/metrics.hpp"
#include "imoca/optimizer/search.hpp"

namespace imoca::engine {

enum class Method { kImocaT, kImocaE, kNaiveCfmo, kMesmo };

std::string method_name(Method m);
Method method_from_name(const std::string& name);
const std::vector<std::string>& method_names();

struct RunConfig {
  std::string problem = "branin-currin";
  Method method = Method::kImocaE;
  std::uint64_t seed = 0;
  double budget = 100.0;          // total normalized cost
  int num_front_samples = 1;      // S
  int init_count = 5;
  int rff_features = 500;
  int nsga_population = 100;
  int nsga_generations = 100;
  int hyperfit_interval = 5;      // records between hyperparameter refits
  int fidelity_grid = 64;         // evenly spaced candidates plus 1.0
  int quad_nodes = 201;           // Simpson nodes for the extended-skew term
  int reference_density = 200;    // reference-front recipe density
  opt::SearchConfig search;

  void validate() const;
};

struct EvaluationRecord {
  Eigen::VectorXd x;
  std::vector<double> z;
  Eigen::VectorXd y;       // raw benchmark outputs
  double cost = 0.0;       // normalized, > 0
  int iteration = 0;       // 0 for the init block
  double wall_time_s = 0;  // elapsed since run start; not persisted
};

struct TraceRow {
  double cumulative_cost = 0.0;
  double phv = 0.0;
  double r2 = 0.0;
  double acquisition = 0.0;  // 0 for init rows
};

struct RunTrace {
  RunConfig config;
  std::vector<EvaluationRecord> records;
  std::vector<TraceRow> rows;  // aligned with records
  pareto::ParetoFrontSample recovered_front;
};

// Run one experiment: Algorithm selection per config.method. The reference
// data supplies the PHV reference point and the R2 target front.
RunTrace run(const RunConfig& config, const bench::BenchmarkProblem& problem,
             const bench::ReferenceData& reference);

// Nondominated front of the de-standardized posterior means at the top
// fidelity (NSGA-II over the mean functions).
pareto::ParetoFrontSample recovered_front_of_means(
    const std::vector<cfgp::CfGpModel>& models,
    const std::vector<double>& value_means, const std::vector<double>& value_scales,
    int dim, int nsga_population, int nsga_generations, std::uint64_t seed);

// --- trace persistence (one structured text file per run) ---

std::string serialize_config(const RunConfig& config);
RunConfig parse_config(const std::string& echo);

void save_trace(const std::string& path, const RunTrace& trace);
RunTrace load_trace(const std::string& path);

// results/<problem>/<method>_seed<seed>.trace
std::string trace_filename(const RunConfig& config);

}  // namespace imoca::engine

#endif
