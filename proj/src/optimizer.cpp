#include "imoca/optimizer/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace imoca::opt {

std::vector<Eigen::VectorXd> latin_hypercube(int count, int dim, Rng& rng) {
  std::vector<Eigen::VectorXd> points(count, Eigen::VectorXd(dim));
  std::vector<int> perm(count);
  for (int j = 0; j < dim; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    for (int i = 0; i < count; ++i) {
      points[i][j] = (perm[i] + rng.uniform()) / count;
    }
  }
  return points;
}

namespace {

struct ZChoice {
  std::vector<double> z;
  double score = -std::numeric_limits<double>::infinity();
};

// best fidelity combination for a fixed input; enumerates the product of the
// admissible lists in lexicographic order (last objective fastest)
ZChoice best_z_for(const Eigen::VectorXd& x, const JointScoreFn& score,
                   const std::vector<std::vector<double>>& admissible) {
  const int k = static_cast<int>(admissible.size());
  for (const auto& list : admissible) {
    if (list.empty()) throw std::logic_error("maximize_joint: empty admissible list");
  }
  std::vector<std::size_t> idx(k, 0);
  std::vector<double> z(k);
  ZChoice best;
  for (;;) {
    for (int j = 0; j < k; ++j) z[j] = admissible[j][idx[j]];
    const double s = score(x, z);
    if (s > best.score) {
      best.score = s;
      best.z = z;
    }
    int j = k - 1;
    while (j >= 0 && ++idx[j] == admissible[j].size()) {
      idx[j] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return best;
}

Eigen::VectorXd clamped_step(const Eigen::VectorXd& x, int coord, double delta) {
  Eigen::VectorXd out = x;
  out[coord] = std::min(1.0, std::max(0.0, out[coord] + delta));
  return out;
}

struct Candidate {
  Eigen::VectorXd x;
  ZChoice choice;
};

// coordinate pattern search with step halving; keeps the incumbent on ties
Candidate pattern_search(Candidate start, int dim, int max_steps,
                         const std::function<ZChoice(const Eigen::VectorXd&)>& eval) {
  Candidate best = std::move(start);
  double step = 0.1;
  for (int iter = 0; iter < max_steps && step >= 1e-3; ++iter) {
    Candidate round_best = best;
    for (int c = 0; c < dim; ++c) {
      for (double sign : {+1.0, -1.0}) {
        Eigen::VectorXd trial = clamped_step(best.x, c, sign * step);
        if (trial[c] == best.x[c]) continue;
        ZChoice choice = eval(trial);
        if (choice.score > round_best.choice.score) {
          round_best = {std::move(trial), std::move(choice)};
        }
      }
    }
    if (round_best.choice.score > best.choice.score) {
      best = std::move(round_best);
    } else {
      step *= 0.5;
    }
  }
  return best;
}

}  // namespace

JointResult maximize_joint(const JointScoreFn& score, const AdmissibleFn& admissible,
                           int dim, const SearchConfig& config) {
  if (config.num_random < 1 || config.num_local < 1 || config.local_steps < 1) {
    throw std::invalid_argument("maximize_joint: counts must be >= 1");
  }
  Rng rng(config.seed);
  const auto candidates = latin_hypercube(config.num_random, dim, rng);

  auto eval = [&](const Eigen::VectorXd& x) { return best_z_for(x, score, admissible(x)); };

  std::vector<Candidate> scored;
  scored.reserve(candidates.size());
  for (const auto& x : candidates) scored.push_back({x, eval(x)});

  std::vector<int> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scored[a].choice.score > scored[b].choice.score;
  });

  const int starts = std::min<int>(config.num_local, static_cast<int>(order.size()));
  Candidate best = scored[order[0]];
  for (int s = 0; s < starts; ++s) {
    Candidate refined = pattern_search(scored[order[s]], dim, config.local_steps, eval);
    if (refined.choice.score > best.choice.score) best = std::move(refined);
  }
  return {best.x, best.choice.z, best.choice.score};
}

InputResult maximize_input_only(const InputScoreFn& score, int dim,
                                const SearchConfig& config) {
  // wrap as a joint problem with a single dummy fidelity
  const JointScoreFn joint = [&score](const Eigen::VectorXd& x,
                                      const std::vector<double>&) { return score(x); };
  const AdmissibleFn admissible = [](const Eigen::VectorXd&) {
    return std::vector<std::vector<double>>{{1.0}};
  };
  const JointResult r = maximize_joint(joint, admissible, dim, config);
  return {r.x, r.score};
}

double cheapest_admissible(const Eigen::VectorXd& x,
                           const std::vector<double>& admissible,
                           const fidelity::CostFn& cost) {
  if (admissible.empty()) {
    throw std::invalid_argument("cheapest_admissible: empty admissible set");
  }
  double best_z = admissible.front();
  double best_cost = cost(x, best_z);
  for (std::size_t i = 1; i < admissible.size(); ++i) {
    const double c = cost(x, admissible[i]);
    if (c < best_cost || (c == best_cost && admissible[i] < best_z)) {
      best_cost = c;
      best_z = admissible[i];
    }
  }
  return best_z;
}

}  // namespace imoca::opt
