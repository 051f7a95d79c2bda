#include "imoca/benchmarks/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace imoca::bench {

namespace {

void check_unit_cube(const Eigen::VectorXd& x, int dim) {
  if (x.size() != dim) {
    throw std::invalid_argument("benchmark: input dimension mismatch");
  }
  if ((x.array() < 0.0).any() || (x.array() > 1.0).any()) {
    throw std::invalid_argument("benchmark: input outside [0,1]^d");
  }
}

void check_fidelities(const BenchmarkProblem& p, const std::vector<double>& z) {
  if (static_cast<int>(z.size()) != p.num_objectives) {
    throw std::invalid_argument("benchmark: fidelity vector length mismatch");
  }
  for (int j = 0; j < p.num_objectives; ++j) {
    if (z[j] < 0.0 || z[j] > 1.0) {
      throw std::invalid_argument("benchmark: fidelity outside [0,1]");
    }
    if (p.discrete_fidelity) {
      const auto& levels = p.fidelity_levels[j];
      bool found = false;
      for (double level : levels) found = found || level == z[j];
      if (!found) {
        throw std::invalid_argument("benchmark: fidelity not an admissible level of " +
                                    p.name);
      }
    }
  }
}

double branin_value(double x1, double x2, double z) {
  const double a = 1.0;
  const double b = 5.1 / (4.0 * M_PI * M_PI) - 0.01 * (1.0 - z);
  const double c = 5.0 / M_PI - 0.1 * (1.0 - z);
  const double r = 6.0;
  const double s = 10.0;
  const double t = 1.0 / (8.0 * M_PI) + 0.05 * (1.0 - z);
  const double inner = x2 - b * x1 * x1 + c * x1 - r;
  return -(a * inner * inner + s * (1.0 - t) * std::cos(x1) + s);
}

double currin_value(double x1, double x2, double z) {
  const double x2f = std::max(x2, 1e-6);  // guard the exp(-1/(2 x2)) singularity
  const double damp = 1.0 - 0.1 * (1.0 - z) * std::exp(-1.0 / (2.0 * x2f));
  const double num = 2300.0 * x1 * x1 * x1 + 1900.0 * x1 * x1 + 2092.0 * x1 + 60.0;
  const double den = 100.0 * x1 * x1 * x1 + 500.0 * x1 * x1 + 4.0 * x1 + 20.0;
  return -(damp * num / den);
}

double power_cost(const Eigen::VectorXd&, double z, double base, double expo) {
  return base + std::pow(z, expo);
}

double signed_quartic_root(double u) {
  return std::copysign(std::pow(std::fabs(u), 0.25), u);
}

}  // namespace

double BenchmarkProblem::normalized_cost(const Eigen::VectorXd& x,
                                         const std::vector<double>& z) const {
  double total = 0.0;
  for (int j = 0; j < num_objectives; ++j) {
    total += cost[j](x, z[j]) / cost[j](x, 1.0);
  }
  return total;
}

std::vector<double> BenchmarkProblem::full_fidelity_set(
    int j, const std::vector<double>& grid) const {
  if (discrete_fidelity) return fidelity_levels[j];
  return grid;
}

BenchmarkProblem branin_currin() {
  BenchmarkProblem p;
  p.name = "branin-currin";
  p.dim = 2;
  p.num_objectives = 2;
  p.ref_recipe = BenchmarkProblem::RefRecipe::kGrid;
  p.evaluate = [p](const Eigen::VectorXd& u, const std::vector<double>& z) {
    check_unit_cube(u, p.dim);
    check_fidelities(p, z);
    // Branin on [-5,10] x [0,15]; Currin on the unit square directly
    const double bx1 = -5.0 + 15.0 * u[0];
    const double bx2 = 15.0 * u[1];
    Eigen::VectorXd f(2);
    f[0] = branin_value(bx1, bx2, z[0]);
    f[1] = currin_value(u[0], u[1], z[1]);
    return f;
  };
  p.cost = {
      [](const Eigen::VectorXd& x, double z) { return power_cost(x, z, 0.05, 6.5); },
      [](const Eigen::VectorXd& x, double z) { return power_cost(x, z, 0.1, 2.0); },
  };
  return p;
}

BenchmarkProblem ackley_rosen_sphere() {
  BenchmarkProblem p;
  p.name = "ackley-rosen-sphere";
  p.dim = 5;
  p.num_objectives = 3;
  p.ref_recipe = BenchmarkProblem::RefRecipe::kNsga;
  p.evaluate = [p](const Eigen::VectorXd& u, const std::vector<double>& z) {
    check_unit_cube(u, p.dim);
    check_fidelities(p, z);
    const Eigen::VectorXd x = 4.0 * u.array() - 2.0;  // box [-2,2]^5
    const int d = p.dim;
    Eigen::VectorXd f(3);

    const double mean_sq = x.squaredNorm() / d;
    const double mean_cos = (2.0 * M_PI * x.array()).cos().sum() / d;
    f[0] = -(-20.0 * std::exp(-0.2 * std::sqrt(mean_sq)) - std::exp(mean_cos) +
             std::exp(1.0) + 20.0) -
           0.01 * (1.0 - z[0]);

    double rosen = 0.0;
    for (int i = 0; i + 1 < d; ++i) {
      const double gap = x[i + 1] - x[i] * x[i] + 0.01 * (1.0 - z[1]);
      rosen += 100.0 * gap * gap + (1.0 - x[i]) * (1.0 - x[i]);
    }
    f[1] = -rosen;

    f[2] = -x.squaredNorm() - 0.01 * (1.0 - z[2]);
    return f;
  };
  const fidelity::CostFn cost = [](const Eigen::VectorXd& x, double z) {
    return power_cost(x, z, 0.05, 6.5);
  };
  p.cost = {cost, cost, cost};
  return p;
}

BenchmarkProblem dtlz1() {
  BenchmarkProblem p;
  p.name = "dtlz1";
  p.dim = 5;
  p.num_objectives = 6;
  p.discrete_fidelity = true;
  p.fidelity_levels.assign(6, {0.2, 0.6, 1.0});
  p.ref_recipe = BenchmarkProblem::RefRecipe::kNsga;
  p.evaluate = [p](const Eigen::VectorXd& x, const std::vector<double>& z) {
    check_unit_cube(x, p.dim);
    check_fidelities(p, z);
    const int d = p.dim;
    double r = 0.0;
    for (int i = 0; i < d; ++i) {
      const double c = x[i] - 0.5;
      r += c * c - std::cos(10.0 * M_PI * c);
    }
    r = 100.0 * (d + r);

    Eigen::VectorXd f(6);
    f[0] = -(1.0 + r) * 0.5 * x.head(5).prod();
    for (int j = 2; j <= 5; ++j) {
      const int m = 6 - j;  // product over the first m coordinates
      f[j - 1] = -(1.0 + r) * 0.5 * (1.0 - x[m]) * x.head(m).prod();
    }
    f[5] = -(1.0 + r) * 0.5 * (1.0 - x[0]);

    Eigen::VectorXd g(6);
    for (int j = 0; j < 6; ++j) {
      const double alpha = 1.0 - z[j];
      double e = 0.0;
      for (int i = 0; i < d; ++i) {
        e += alpha * std::cos(10.0 * M_PI * alpha * x[i] + 0.5 * M_PI * alpha + M_PI);
      }
      g[j] = f[j] - e;
    }
    return g;
  };
  const fidelity::CostFn cost = [](const Eigen::VectorXd&, double z) {
    if (z == 0.2) return 0.01;
    if (z == 0.6) return 0.1;
    if (z == 1.0) return 1.0;
    throw std::invalid_argument("dtlz1: fidelity must be one of {0.2, 0.6, 1}");
  };
  p.cost.assign(6, cost);
  return p;
}

BenchmarkProblem qv() {
  BenchmarkProblem p;
  p.name = "qv";
  p.dim = 8;
  p.num_objectives = 2;
  p.discrete_fidelity = true;
  p.fidelity_levels = {{1.0}, {0.5, 1.0}};
  p.ref_recipe = BenchmarkProblem::RefRecipe::kNsga;
  p.evaluate = [p](const Eigen::VectorXd& x, const std::vector<double>& z) {
    check_unit_cube(x, p.dim);
    check_fidelities(p, z);
    const int d = p.dim;
    static const double alpha[8] = {0.9, 1.1, 0.9, 1.1, 0.9, 1.1, 0.9, 1.1};

    double s1 = 0.0;
    for (int i = 0; i < d; ++i) {
      s1 += x[i] * x[i] - 20.0 * M_PI * x[i] + 10.0;
    }
    Eigen::VectorXd f(2);
    f[0] = -signed_quartic_root(s1 / d);

    double s2 = 0.0;
    const bool low = z[1] != 1.0;
    for (int i = 0; i < d; ++i) {
      const double y = x[i] - 1.5;
      const double w = low ? alpha[i] : 1.0;
      s2 += w * y * y - 20.0 * M_PI * y + 10.0;
    }
    f[1] = -signed_quartic_root(s2 / d);
    return f;
  };
  p.cost = {
      [](const Eigen::VectorXd&, double z) {
        if (z != 1.0) throw std::invalid_argument("qv: objective 1 has only the top fidelity");
        return 1.0;
      },
      [](const Eigen::VectorXd&, double z) {
        if (z == 0.5) return 0.1;
        if (z == 1.0) return 1.0;
        throw std::invalid_argument("qv: fidelity must be 0.5 or 1");
      },
  };
  return p;
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {
      "branin-currin", "ackley-rosen-sphere", "dtlz1", "qv"};
  return names;
}

BenchmarkProblem problem_by_name(const std::string& name) {
  if (name == "branin-currin") return branin_currin();
  if (name == "ackley-rosen-sphere") return ackley_rosen_sphere();
  if (name == "dtlz1") return dtlz1();
  if (name == "qv") return qv();
  std::string known;
  for (const auto& n : problem_names()) known += " " + n;
  throw std::invalid_argument("unknown problem '" + name + "'; registered:" + known);
}

}  // namespace imoca::bench
