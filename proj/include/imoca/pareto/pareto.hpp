#ifndef IMOCA_PARETO_PARETO_HPP
#define IMOCA_PARETO_PARETO_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "imoca/rng.hpp"

namespace imoca::pareto {

// Objective vectors follow the maximization convention everywhere.
using ObjectiveVector = Eigen::VectorXd;

// Mutually nondominated objective vectors plus the per-objective maxima over
// the front.
struct ParetoFrontSample {
  std::vector<ObjectiveVector> points;
  ObjectiveVector per_objective_max;

  int num_objectives() const {
    return static_cast<int>(per_objective_max.size());
  }
};

// True iff a >= b componentwise with strict improvement in some component.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

// Maximal elements of a nonempty set. Duplicates of a surviving point are kept
// (they dominate nothing and are dominated by nothing).
ParetoFrontSample nondominated_filter(const std::vector<ObjectiveVector>& points);

struct Nsga2Config {
  int population = 100;
  int generations = 100;
  double crossover_prob = 0.9;
  double crossover_eta = 15.0;
  double mutation_eta = 20.0;
  // mutation probability defaults to 1/d when <= 0
  double mutation_prob = -1.0;
  std::uint64_t seed = 0;
};

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;

// Thrown when an objective returns a non-finite value; carries the input.
struct EvaluationError : std::runtime_error {
  Eigen::VectorXd input;
  EvaluationError(std::string what, Eigen::VectorXd x)
      : std::runtime_error(std::move(what)), input(std::move(x)) {}
};

struct Nsga2Result {
  ParetoFrontSample front;
  std::vector<Eigen::VectorXd> front_inputs;  // aligned with front.points
};

// NSGA-II over [0,1]^d, maximizing all objectives. Returns the nondominated
// set of the final population; deterministic for a fixed seed.
Nsga2Result nsga2_solve(const std::vector<ObjectiveFn>& objectives, int dim,
                        const Nsga2Config& config);

}  // namespace imoca::pareto

#endif
