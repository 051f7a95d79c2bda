#include "imoca/benchmarks/reference.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "imoca/textio.hpp"

namespace imoca::bench {

namespace {

std::vector<double> top_fidelities(const BenchmarkProblem& p) {
  return std::vector<double>(p.num_objectives, 1.0);
}

pareto::ParetoFrontSample grid_front(const BenchmarkProblem& p, int density) {
  const auto z = top_fidelities(p);
  std::vector<pareto::ObjectiveVector> values;
  if (p.dim != 2) {
    throw std::invalid_argument("reference_front: grid recipe implemented for d=2");
  }
  values.reserve(static_cast<std::size_t>(density) * density);
  Eigen::VectorXd x(2);
  for (int i = 0; i < density; ++i) {
    x[0] = density == 1 ? 0.0 : static_cast<double>(i) / (density - 1);
    for (int j = 0; j < density; ++j) {
      x[1] = density == 1 ? 0.0 : static_cast<double>(j) / (density - 1);
      values.push_back(p.evaluate(x, z));
    }
  }
  return pareto::nondominated_filter(values);
}

pareto::ParetoFrontSample nsga_front(const BenchmarkProblem& p, int generations) {
  const auto z = top_fidelities(p);
  std::vector<pareto::ObjectiveFn> objectives;
  for (int j = 0; j < p.num_objectives; ++j) {
    objectives.push_back([&p, z, j](const Eigen::VectorXd& x) {
      return p.evaluate(x, z)[j];
    });
  }
  pareto::Nsga2Config cfg;
  cfg.population = 120;
  cfg.generations = generations;
  cfg.seed = 0;
  return pareto::nsga2_solve(objectives, p.dim, cfg).front;
}

}  // namespace

pareto::ParetoFrontSample reference_front(const BenchmarkProblem& problem,
                                          int grid_density) {
  if (grid_density < 2) {
    throw std::invalid_argument("reference_front: density must be >= 2");
  }
  if (problem.ref_recipe == BenchmarkProblem::RefRecipe::kGrid) {
    double total = 1.0;
    for (int i = 0; i < problem.dim; ++i) total *= grid_density;
    if (total > 1e7) {
      std::cerr << "reference_front: density " << grid_density << " infeasible for d="
                << problem.dim << ", using NSGA-II recipe\n";
      return nsga_front(problem, 400);
    }
    return grid_front(problem, grid_density);
  }
  return nsga_front(problem, grid_density);
}

std::string reference_cache_path(const std::string& cache_dir,
                                 const std::string& problem_name, int grid_density) {
  return cache_dir + "/ref_" + problem_name + "_" + std::to_string(grid_density) +
         ".txt";
}

void save_reference(const std::string& path, const ReferenceData& data) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("save_reference: cannot open " + tmp);
    out << "# imoca-reference-front v1\n";
    out << "objectives," << data.phv_reference_point.size() << "\n";
    out << "phv_reference";
    for (Eigen::Index i = 0; i < data.phv_reference_point.size(); ++i) {
      out << "," << format_double(data.phv_reference_point[i]);
    }
    out << "\n";
    for (const auto& p : data.front.points) {
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        out << (i ? "," : "") << format_double(p[i]);
      }
      out << "\n";
    }
  }
  std::filesystem::rename(tmp, path);
}

std::optional<ReferenceData> load_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line) || line != "# imoca-reference-front v1") return std::nullopt;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
  };
  if (!std::getline(in, line)) return std::nullopt;
  const auto hdr = split(line);
  if (hdr.size() != 2 || hdr[0] != "objectives") return std::nullopt;
  const int k = static_cast<int>(parse_int(hdr[1]));
  if (!std::getline(in, line)) return std::nullopt;
  const auto refline = split(line);
  if (refline.size() != static_cast<std::size_t>(k + 1) || refline[0] != "phv_reference") {
    return std::nullopt;
  }
  ReferenceData data;
  data.phv_reference_point.resize(k);
  for (int i = 0; i < k; ++i) data.phv_reference_point[i] = parse_double(refline[i + 1]);
  std::vector<pareto::ObjectiveVector> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != static_cast<std::size_t>(k)) return std::nullopt;
    Eigen::VectorXd p(k);
    for (int i = 0; i < k; ++i) p[i] = parse_double(cells[i]);
    pts.push_back(std::move(p));
  }
  if (pts.empty()) return std::nullopt;
  data.front = pareto::nondominated_filter(pts);
  return data;
}

ReferenceData ensure_reference_front(const BenchmarkProblem& problem,
                                     int grid_density, const std::string& cache_dir) {
  std::filesystem::create_directories(cache_dir);
  const std::string path =
      reference_cache_path(cache_dir, problem.name, grid_density);
  if (auto cached = load_reference(path)) return *cached;
  ReferenceData data;
  data.front = reference_front(problem, grid_density);
  Eigen::VectorXd mins = data.front.points.front();
  for (const auto& p : data.front.points) mins = mins.cwiseMin(p);
  data.phv_reference_point = mins.array() - 1.0;
  save_reference(path, data);
  return data;
}

}  // namespace imoca::bench
