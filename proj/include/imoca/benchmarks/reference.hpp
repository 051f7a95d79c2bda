#ifndef IMOCA_BENCHMARKS_REFERENCE_HPP
#define IMOCA_BENCHMARKS_REFERENCE_HPP

#include <optional>
#include <string>

#include "imoca/benchmarks/problems.hpp"
#include "imoca/pareto/pareto.hpp"

namespace imoca::bench {

// Reference Pareto front of the top-fidelity objectives. Grid problems sweep
// grid_density points per dimension; the rest run NSGA-II with grid_density
// generations at population 120 (seed 0). Deterministic.
pareto::ParetoFrontSample reference_front(const BenchmarkProblem& problem,
                                          int grid_density);

struct ReferenceData {
  pareto::ParetoFrontSample front;
  // per-objective minimum over the front minus 1.0; persisted so runs compare
  Eigen::VectorXd phv_reference_point;
};

// Load the cached front for (problem, density) from cache_dir, or compute and
// persist it. Files are plain text keyed by problem name and density.
ReferenceData ensure_reference_front(const BenchmarkProblem& problem,
                                     int grid_density, const std::string& cache_dir);

std::string reference_cache_path(const std::string& cache_dir,
                                 const std::string& problem_name, int grid_density);

void save_reference(const std::string& path, const ReferenceData& data);
std::optional<ReferenceData> load_reference(const std::string& path);

}  // namespace imoca::bench

#endif
