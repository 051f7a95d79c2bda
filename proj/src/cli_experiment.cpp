#include "imoca/cli/experiment.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "imoca/textio.hpp"

namespace imoca::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& field) {
  std::vector<std::uint64_t> seeds;
  const auto range = field.find("..");
  if (range != std::string::npos) {
    const auto lo = parse_int(field.substr(0, range));
    const auto hi = parse_int(field.substr(range + 2));
    for (auto s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  } else {
    for (const auto& tok : split(field, ' ')) {
      if (!tok.empty()) seeds.push_back(static_cast<std::uint64_t>(parse_int(tok)));
    }
  }
  return seeds;
}

void apply_override(engine::RunConfig& config, const std::string& pair) {
  // reuse the trace config grammar, one key=value at a time
  const engine::RunConfig base = config;
  const std::string echo = engine::serialize_config(base);
  engine::RunConfig parsed = engine::parse_config(echo + " " + pair);
  config = parsed;
}

}  // namespace

ExperimentSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec file " + path);
  std::string line;
  if (!std::getline(in, line) || line != "# imoca-spec v1") {
    throw std::invalid_argument("spec file must start with '# imoca-spec v1'");
  }
  ExperimentSpec spec;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (cells.size() == 2 && cells[0] == "output") {
      spec.output_dir = cells[1];
      continue;
    }
    if (cells.size() < 4 || cells.size() > 5) {
      throw std::invalid_argument("bad spec row: " + line);
    }
    engine::RunConfig base;
    base.problem = cells[0];
    base.method = engine::method_from_name(cells[1]);
    const auto seeds = parse_seeds(cells[2]);
    if (seeds.empty()) throw std::invalid_argument("empty seed list in row: " + line);
    base.budget = parse_double(cells[3]);
    if (cells.size() == 5) {
      for (const auto& pair : split(cells[4], ';')) {
        if (!pair.empty()) apply_override(base, pair);
      }
    }
    bench::problem_by_name(base.problem);  // validates the name
    for (auto seed : seeds) {
      engine::RunConfig config = base;
      config.seed = seed;
      spec.runs.push_back(std::move(config));
    }
  }
  if (spec.runs.empty()) throw std::invalid_argument("spec file declares no runs");
  if (const char* root = std::getenv("IMOCA_OUTPUT_ROOT")) {
    if (fs::path(spec.output_dir).is_relative()) {
      spec.output_dir = (fs::path(root) / spec.output_dir).string();
    }
  }
  return spec;
}

int cmd_run(const std::string& spec_path, bool force, int jobs) {
  ExperimentSpec spec;
  try {
    spec = parse_spec_file(spec_path);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  }

  fs::create_directories(spec.output_dir);

  // warm the reference-front cache serially so workers only read it
  std::map<std::string, bench::ReferenceData> references;
  std::map<std::string, bench::BenchmarkProblem> problems;
  for (const auto& config : spec.runs) {
    if (problems.count(config.problem)) continue;
    problems.emplace(config.problem, bench::problem_by_name(config.problem));
    references.emplace(config.problem,
                       bench::ensure_reference_front(problems.at(config.problem),
                                                     config.reference_density,
                                                     spec.output_dir + "/ref_fronts"));
  }

  struct Task {
    engine::RunConfig config;
    std::string path;
  };
  std::vector<Task> tasks;
  for (const auto& config : spec.runs) {
    const std::string path =
        (fs::path(spec.output_dir) / engine::trace_filename(config)).string();
    if (!force && fs::exists(path)) {
      std::cout << "skip: " << path << " exists (use --force to rerun)\n";
      continue;
    }
    fs::create_directories(fs::path(path).parent_path());
    tasks.push_back({config, path});
  }

  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  std::mutex io_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const auto& task = tasks[i];
      try {
        const auto trace = engine::run(task.config, problems.at(task.config.problem),
                                       references.at(task.config.problem));
        engine::save_trace(task.path, trace);
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cout << "run: wrote " << task.path << " (" << trace.records.size()
                  << " evaluations)\n";
      } catch (const std::exception& e) {
        ++failures;
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "run failed for " << task.path << ": " << e.what() << "\n";
      }
    }
  };

  const int worker_count = std::max(
      1, std::min<int>(jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency()),
                       static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < worker_count; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  return failures.load() == 0 ? kExitOk : kExitRunFailure;
}

AggregateCurve aggregate_traces(const std::vector<engine::RunTrace>& traces,
                                double cost_max, int checkpoints) {
  AggregateCurve curve;
  for (int c = 1; c <= checkpoints; ++c) {
    curve.cost.push_back(cost_max * c / checkpoints);
  }
  const std::size_t n = traces.size();
  for (double checkpoint : curve.cost) {
    double phv_sum = 0.0, phv_sq = 0.0, r2_sum = 0.0, r2_sq = 0.0;
    for (const auto& trace : traces) {
      // step interpolation: last row at or below the checkpoint, first row
      // carried backward before any data
      const engine::TraceRow* at = &trace.rows.front();
      for (const auto& row : trace.rows) {
        if (row.cumulative_cost <= checkpoint) at = &row;
        else break;
      }
      phv_sum += at->phv;
      phv_sq += at->phv * at->phv;
      r2_sum += at->r2;
      r2_sq += at->r2 * at->r2;
    }
    const double phv_mean = phv_sum / n;
    const double r2_mean = r2_sum / n;
    curve.phv_mean.push_back(phv_mean);
    curve.phv_var.push_back(std::max(0.0, phv_sq / n - phv_mean * phv_mean));
    curve.r2_mean.push_back(r2_mean);
    curve.r2_var.push_back(std::max(0.0, r2_sq / n - r2_mean * r2_mean));
  }
  return curve;
}

int cmd_summarize(const std::string& output_dir) {
  std::vector<engine::RunTrace> traces;
  if (!fs::exists(output_dir)) {
    std::cerr << "configuration error: no such directory " << output_dir << "\n";
    return kExitConfigError;
  }
  for (const auto& entry : fs::recursive_directory_iterator(output_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".trace") {
      traces.push_back(engine::load_trace(entry.path().string()));
    }
  }
  if (traces.empty()) {
    std::cerr << "configuration error: no trace files under " << output_dir << "\n";
    return kExitConfigError;
  }

  // group by problem, then method
  std::map<std::string, std::map<std::string, std::vector<engine::RunTrace>>> grouped;
  for (auto& trace : traces) {
    grouped[trace.config.problem][engine::method_name(trace.config.method)]
        .push_back(std::move(trace));
  }

  for (const auto& [problem, by_method] : grouped) {
    int k = -1;
    double cost_max = 0.0;
    for (const auto& [method, group] : by_method) {
      for (const auto& trace : group) {
        const int trace_k = static_cast<int>(trace.records.front().z.size());
        if (k < 0) k = trace_k;
        if (trace_k != k) {
          std::cerr << "aggregation error: inconsistent objective count for "
                    << problem << "\n";
          return kExitRunFailure;
        }
        cost_max = std::max(cost_max, trace.rows.back().cumulative_cost);
      }
    }

    std::map<std::string, AggregateCurve> curves;
    for (const auto& [method, group] : by_method) {
      curves[method] = aggregate_traces(group, cost_max);
      const std::string path =
          output_dir + "/summary_" + problem + "_" + method + ".csv";
      std::ofstream out(path);
      out << "# imoca-summary v1 problem=" << problem << " method=" << method
          << " runs=" << group.size() << "\n";
      out << "cost,phv_mean,phv_var,r2_mean,r2_var\n";
      const auto& c = curves[method];
      for (std::size_t i = 0; i < c.cost.size(); ++i) {
        out << format_double(c.cost[i]) << "," << format_double(c.phv_mean[i]) << ","
            << format_double(c.phv_var[i]) << "," << format_double(c.r2_mean[i])
            << "," << format_double(c.r2_var[i]) << "\n";
      }
      std::cout << "summarize: wrote " << path << "\n";
    }

    // pairwise cost-reduction table at each baseline's final mean PHV
    const std::string path = output_dir + "/cost_reduction_" + problem + ".csv";
    std::ofstream out(path);
    out << "# imoca-cost-reduction v1 problem=" << problem << "\n";
    out << "method,baseline,target_phv,status,gain_percent\n";
    for (const auto& [method, curve_a] : curves) {
      for (const auto& [baseline, curve_b] : curves) {
        if (method == baseline) continue;
        const double target = curve_b.phv_mean.back();
        std::vector<metrics::CostPhvPoint> a, b;
        for (std::size_t i = 0; i < curve_a.cost.size(); ++i) {
          a.push_back({curve_a.cost[i], curve_a.phv_mean[i]});
          b.push_back({curve_b.cost[i], curve_b.phv_mean[i]});
        }
        const auto gain = metrics::cost_reduction(a, b, target);
        out << method << "," << baseline << "," << format_double(target) << ",";
        if (gain) {
          out << "ok," << format_double(*gain * 100.0) << "\n";
        } else {
          out << "did-not-converge,\n";
        }
      }
    }
    std::cout << "summarize: wrote " << path << "\n";
  }
  return kExitOk;
}

}  // namespace imoca::cli
