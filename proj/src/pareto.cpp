#include "imoca/pareto/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace imoca::pareto {

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dominates: objective vectors differ in length");
  }
  bool strict = false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strict = true;
  }
  return strict;
}

ParetoFrontSample nondominated_filter(const std::vector<ObjectiveVector>& points) {
  if (points.empty()) {
    throw std::invalid_argument("nondominated_filter: empty input");
  }
  ParetoFrontSample out;
  for (const auto& p : points) {
    bool dominated = false;
    for (const auto& q : points) {
      if (&q != &p && dominates(q, p)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.points.push_back(p);
  }
  const Eigen::Index k = points.front().size();
  out.per_objective_max = ObjectiveVector::Constant(k, -std::numeric_limits<double>::infinity());
  for (const auto& p : out.points) {
    out.per_objective_max = out.per_objective_max.cwiseMax(p);
  }
  return out;
}

namespace {

struct Individual {
  Eigen::VectorXd x;
  ObjectiveVector f;
  int rank = 0;
  double crowding = 0.0;
};

ObjectiveVector evaluate(const std::vector<ObjectiveFn>& objectives,
                         const Eigen::VectorXd& x) {
  ObjectiveVector f(static_cast<Eigen::Index>(objectives.size()));
  for (std::size_t j = 0; j < objectives.size(); ++j) {
    const double v = objectives[j](x);
    if (!std::isfinite(v)) {
      throw EvaluationError("nsga2: objective returned non-finite value", x);
    }
    f[static_cast<Eigen::Index>(j)] = v;
  }
  return f;
}

// Fast nondominated sort; assigns ranks (0 = best front).
void assign_ranks(std::vector<Individual>& pop) {
  const int n = static_cast<int>(pop.size());
  std::vector<std::vector<int>> dominated_by(n);
  std::vector<int> domination_count(n, 0);
  std::vector<int> current;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (dominates(pop[i].f, pop[j].f)) {
        dominated_by[i].push_back(j);
      } else if (dominates(pop[j].f, pop[i].f)) {
        ++domination_count[i];
      }
    }
    if (domination_count[i] == 0) {
      pop[i].rank = 0;
      current.push_back(i);
    }
  }
  int rank = 0;
  while (!current.empty()) {
    std::vector<int> next;
    for (int i : current) {
      for (int j : dominated_by[i]) {
        if (--domination_count[j] == 0) {
          pop[j].rank = rank + 1;
          next.push_back(j);
        }
      }
    }
    ++rank;
    current = std::move(next);
  }
}

void assign_crowding(std::vector<Individual>& pop, const std::vector<int>& front) {
  const int k = static_cast<int>(pop[front[0]].f.size());
  for (int i : front) pop[i].crowding = 0.0;
  std::vector<int> order(front);
  for (int obj = 0; obj < k; ++obj) {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return pop[a].f[obj] < pop[b].f[obj];
    });
    const double lo = pop[order.front()].f[obj];
    const double hi = pop[order.back()].f[obj];
    pop[order.front()].crowding = std::numeric_limits<double>::infinity();
    pop[order.back()].crowding = std::numeric_limits<double>::infinity();
    if (hi <= lo) continue;
    for (std::size_t m = 1; m + 1 < order.size(); ++m) {
      pop[order[m]].crowding +=
          (pop[order[m + 1]].f[obj] - pop[order[m - 1]].f[obj]) / (hi - lo);
    }
  }
}

// rank, then crowding, then lower index (deterministic tie-break).
bool better(const std::vector<Individual>& pop, int a, int b) {
  if (pop[a].rank != pop[b].rank) return pop[a].rank < pop[b].rank;
  if (pop[a].crowding != pop[b].crowding) return pop[a].crowding > pop[b].crowding;
  return a < b;
}

int tournament(const std::vector<Individual>& pop, Rng& rng) {
  const int a = static_cast<int>(rng.index(pop.size()));
  const int b = static_cast<int>(rng.index(pop.size()));
  return better(pop, a, b) ? a : b;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Simulated binary crossover on one variable pair (Deb & Agrawal).
void sbx_pair(double& c1, double& c2, double eta, Rng& rng) {
  if (std::fabs(c1 - c2) < 1e-14) return;
  const double y1 = std::min(c1, c2);
  const double y2 = std::max(c1, c2);
  const double u = rng.uniform();
  auto spread = [&](double beta_bound) {
    const double alpha = 2.0 - std::pow(beta_bound, -(eta + 1.0));
    if (u <= 1.0 / alpha) return std::pow(u * alpha, 1.0 / (eta + 1.0));
    return std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
  };
  // reflect against the [0,1] box
  double beta = 1.0 + 2.0 * y1 / (y2 - y1);
  const double child1 = 0.5 * ((y1 + y2) - spread(beta) * (y2 - y1));
  beta = 1.0 + 2.0 * (1.0 - y2) / (y2 - y1);
  const double child2 = 0.5 * ((y1 + y2) + spread(beta) * (y2 - y1));
  c1 = clamp01(child1);
  c2 = clamp01(child2);
  if (rng.uniform() < 0.5) std::swap(c1, c2);
}

void polynomial_mutation(Eigen::VectorXd& x, double prob, double eta, Rng& rng) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (rng.uniform() >= prob) continue;
    const double y = x[i];
    const double u = rng.uniform();
    double delta;
    if (u < 0.5) {
      const double b = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - y, eta + 1.0);
      delta = std::pow(b, 1.0 / (eta + 1.0)) - 1.0;
    } else {
      const double b =
          2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(y, eta + 1.0);
      delta = 1.0 - std::pow(b, 1.0 / (eta + 1.0));
    }
    x[i] = clamp01(y + delta);
  }
}

}  // namespace

Nsga2Result nsga2_solve(const std::vector<ObjectiveFn>& objectives, int dim,
                        const Nsga2Config& config) {
  if (objectives.empty() || dim < 1) {
    throw std::invalid_argument("nsga2: need >=1 objective and dim >= 1");
  }
  if (config.population < 4 || config.population % 2 != 0) {
    throw std::invalid_argument("nsga2: population must be >= 4 and even");
  }
  Rng rng(config.seed);
  const double pm =
      config.mutation_prob > 0.0 ? config.mutation_prob : 1.0 / dim;

  std::vector<Individual> pop(config.population);
  for (auto& ind : pop) {
    ind.x = Eigen::VectorXd::NullaryExpr(dim, [&](Eigen::Index) { return rng.uniform(); });
    ind.f = evaluate(objectives, ind.x);
  }
  assign_ranks(pop);
  {
    std::vector<std::vector<int>> fronts;
    for (int i = 0; i < config.population; ++i) {
      if (pop[i].rank >= static_cast<int>(fronts.size())) fronts.resize(pop[i].rank + 1);
      fronts[pop[i].rank].push_back(i);
    }
    for (auto& f : fronts) assign_crowding(pop, f);
  }

  for (int gen = 0; gen < config.generations; ++gen) {
    std::vector<Individual> offspring;
    offspring.reserve(config.population);
    while (static_cast<int>(offspring.size()) < config.population) {
      Eigen::VectorXd c1 = pop[tournament(pop, rng)].x;
      Eigen::VectorXd c2 = pop[tournament(pop, rng)].x;
      if (rng.uniform() < config.crossover_prob) {
        for (int i = 0; i < dim; ++i) {
          if (rng.uniform() < 0.5) sbx_pair(c1[i], c2[i], config.crossover_eta, rng);
        }
      }
      polynomial_mutation(c1, pm, config.mutation_eta, rng);
      polynomial_mutation(c2, pm, config.mutation_eta, rng);
      Individual o1, o2;
      o1.x = std::move(c1);
      o1.f = evaluate(objectives, o1.x);
      o2.x = std::move(c2);
      o2.f = evaluate(objectives, o2.x);
      offspring.push_back(std::move(o1));
      offspring.push_back(std::move(o2));
    }

    // environmental selection on the combined population
    std::vector<Individual> combined = std::move(pop);
    for (auto& o : offspring) combined.push_back(std::move(o));
    assign_ranks(combined);
    std::vector<std::vector<int>> fronts;
    for (std::size_t i = 0; i < combined.size(); ++i) {
      const int r = combined[i].rank;
      if (r >= static_cast<int>(fronts.size())) fronts.resize(r + 1);
      fronts[r].push_back(static_cast<int>(i));
    }
    for (auto& f : fronts) assign_crowding(combined, f);

    pop.clear();
    pop.reserve(config.population);
    for (const auto& front : fronts) {
      if (static_cast<int>(pop.size() + front.size()) <= config.population) {
        for (int i : front) pop.push_back(combined[i]);
      } else {
        std::vector<int> sorted(front);
        std::stable_sort(sorted.begin(), sorted.end(), [&](int a, int b) {
          if (combined[a].crowding != combined[b].crowding) {
            return combined[a].crowding > combined[b].crowding;
          }
          return a < b;
        });
        for (int i : sorted) {
          if (static_cast<int>(pop.size()) == config.population) break;
          pop.push_back(combined[i]);
        }
      }
      if (static_cast<int>(pop.size()) == config.population) break;
    }
  }

  std::vector<ObjectiveVector> finals;
  finals.reserve(pop.size());
  for (const auto& ind : pop) finals.push_back(ind.f);
  ParetoFrontSample front = nondominated_filter(finals);

  // align inputs with the surviving points (first match wins)
  Nsga2Result result;
  result.front = std::move(front);
  std::vector<bool> used(pop.size(), false);
  for (const auto& p : result.front.points) {
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (!used[i] && (pop[i].f.array() == p.array()).all()) {
        result.front_inputs.push_back(pop[i].x);
        used[i] = true;
        break;
      }
    }
  }
  return result;
}

}  // namespace imoca::pareto
