#ifndef IMOCA_BENCHMARKS_PROBLEMS_HPP
#define IMOCA_BENCHMARKS_PROBLEMS_HPP

#include <functional>
#include <string>
#include <vector>

#include "imoca/fidelity/reduction.hpp"

namespace imoca::bench {

// Analytic multi-fidelity objective bundle in maximization convention.
// Inputs live in the internal unit cube; each factory maps to its native box.
struct BenchmarkProblem {
  std::string name;
  int dim = 0;
  int num_objectives = 0;
  bool discrete_fidelity = false;
  // admissible fidelity levels per objective for discrete problems;
  // continuous problems leave this empty (z ranges over [0,1])
  std::vector<std::vector<double>> fidelity_levels;
  // evaluate all K objectives at (x, z-vector)
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const std::vector<double>&)>
      evaluate;
  // per-objective evaluation cost
  std::vector<fidelity::CostFn> cost;
  // reference-front recipe: dense grid for low dim, NSGA-II otherwise
  enum class RefRecipe { kGrid, kNsga } ref_recipe = RefRecipe::kGrid;

  // normalized cost sum_j C_j(x,z_j)/C_j(x,1); equals K at the top fidelities
  double normalized_cost(const Eigen::VectorXd& x, const std::vector<double>& z) const;
  // admissible fidelities for objective j when no model-based reduction applies
  std::vector<double> full_fidelity_set(int j, const std::vector<double>& grid) const;
};

BenchmarkProblem branin_currin();
BenchmarkProblem ackley_rosen_sphere();
BenchmarkProblem dtlz1();
BenchmarkProblem qv();

const std::vector<std::string>& problem_names();
BenchmarkProblem problem_by_name(const std::string& name);

}  // namespace imoca::bench

#endif
