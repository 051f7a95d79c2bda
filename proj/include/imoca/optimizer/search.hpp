#ifndef IMOCA_OPTIMIZER_SEARCH_HPP
#define IMOCA_OPTIMIZER_SEARCH_HPP

#include <functional>
#include <vector>

#include "imoca/fidelity/reduction.hpp"
#include "imoca/rng.hpp"

namespace imoca::opt {

struct SearchConfig {
  int num_random = 1000;  // Latin-hypercube candidates
  int num_local = 5;      // pattern-search starts
  int local_steps = 40;   // pattern-search iterations per start
  std::uint64_t seed = 0;
};

// admissible fidelity list per objective at a given input
using AdmissibleFn =
    std::function<std::vector<std::vector<double>>(const Eigen::VectorXd&)>;
using JointScoreFn =
    std::function<double(const Eigen::VectorXd&, const std::vector<double>&)>;
using InputScoreFn = std::function<double(const Eigen::VectorXd&)>;

struct JointResult {
  Eigen::VectorXd x;
  std::vector<double> z;
  double score = 0.0;
};

struct InputResult {
  Eigen::VectorXd x;
  double score = 0.0;
};

std::vector<Eigen::VectorXd> latin_hypercube(int count, int dim, Rng& rng);

// Maximize score over Latin-hypercube inputs crossed with the product of the
// per-objective admissible fidelity lists, then refine the top starts with a
// coordinate pattern search (step halving 0.1 -> 1e-3, fidelities re-projected
// to the admissible lists at every trial input). Ties keep the first-evaluated
// candidate; deterministic for a fixed seed.
JointResult maximize_joint(const JointScoreFn& score, const AdmissibleFn& admissible,
                           int dim, const SearchConfig& config);

// Same search restricted to the input space.
InputResult maximize_input_only(const InputScoreFn& score, int dim,
                                const SearchConfig& config);

// Member of the admissible list with minimal cost; ties go to the smallest z.
double cheapest_admissible(const Eigen::VectorXd& x,
                           const std::vector<double>& admissible,
                           const fidelity::CostFn& cost);

}  // namespace imoca::opt

#endif
