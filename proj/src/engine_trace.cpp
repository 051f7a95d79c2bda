#include <fstream>
#include <sstream>

#include "imoca/engine/engine.hpp"
#include "imoca/textio.hpp"

namespace imoca::engine {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

}  // namespace

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  out << "problem=" << config.problem;
  out << " method=" << method_name(config.method);
  out << " seed=" << config.seed;
  out << " budget=" << format_double(config.budget);
  out << " S=" << config.num_front_samples;
  out << " init=" << config.init_count;
  out << " rff=" << config.rff_features;
  out << " nsga_pop=" << config.nsga_population;
  out << " nsga_gen=" << config.nsga_generations;
  out << " hyperfit_interval=" << config.hyperfit_interval;
  out << " fidelity_grid=" << config.fidelity_grid;
  out << " quad_nodes=" << config.quad_nodes;
  out << " ref_density=" << config.reference_density;
  out << " num_random=" << config.search.num_random;
  out << " num_local=" << config.search.num_local;
  out << " local_steps=" << config.search.local_steps;
  return out.str();
}

RunConfig parse_config(const std::string& echo) {
  RunConfig config;
  for (const auto& pair : split(echo, ' ')) {
    if (pair.empty()) continue;
    const auto eq = pair.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("parse_config: bad token '" + pair + "'");
    }
    const std::string key = pair.substr(0, eq);
    const std::string value = pair.substr(eq + 1);
    if (key == "problem") config.problem = value;
    else if (key == "method") config.method = method_from_name(value);
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_int(value));
    else if (key == "budget") config.budget = parse_double(value);
    else if (key == "S") config.num_front_samples = static_cast<int>(parse_int(value));
    else if (key == "init") config.init_count = static_cast<int>(parse_int(value));
    else if (key == "rff") config.rff_features = static_cast<int>(parse_int(value));
    else if (key == "nsga_pop") config.nsga_population = static_cast<int>(parse_int(value));
    else if (key == "nsga_gen") config.nsga_generations = static_cast<int>(parse_int(value));
    else if (key == "hyperfit_interval") config.hyperfit_interval = static_cast<int>(parse_int(value));
    else if (key == "fidelity_grid") config.fidelity_grid = static_cast<int>(parse_int(value));
    else if (key == "quad_nodes") config.quad_nodes = static_cast<int>(parse_int(value));
    else if (key == "ref_density") config.reference_density = static_cast<int>(parse_int(value));
    else if (key == "num_random") config.search.num_random = static_cast<int>(parse_int(value));
    else if (key == "num_local") config.search.num_local = static_cast<int>(parse_int(value));
    else if (key == "local_steps") config.search.local_steps = static_cast<int>(parse_int(value));
    else throw std::invalid_argument("parse_config: unknown key '" + key + "'");
  }
  return config;
}

std::string trace_filename(const RunConfig& config) {
  return config.problem + "/" + method_name(config.method) + "_seed" +
         std::to_string(config.seed) + ".trace";
}

void save_trace(const std::string& path, const RunTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_trace: cannot open " + path);
  const int d = static_cast<int>(trace.records.front().x.size());
  const int k = static_cast<int>(trace.records.front().z.size());
  out << "# imoca-trace v1\n";
  out << "# config " << serialize_config(trace.config) << "\n";
  out << "iteration";
  for (int i = 0; i < d; ++i) out << ",x" << i;
  for (int j = 0; j < k; ++j) out << ",z" << j;
  for (int j = 0; j < k; ++j) out << ",y" << j;
  out << ",cost,cum_cost,acquisition,phv,r2\n";
  for (std::size_t r = 0; r < trace.records.size(); ++r) {
    const auto& rec = trace.records[r];
    const auto& row = trace.rows[r];
    out << rec.iteration;
    for (int i = 0; i < d; ++i) out << "," << format_double(rec.x[i]);
    for (int j = 0; j < k; ++j) out << "," << format_double(rec.z[j]);
    for (int j = 0; j < k; ++j) out << "," << format_double(rec.y[j]);
    out << "," << format_double(rec.cost) << "," << format_double(row.cumulative_cost)
        << "," << format_double(row.acquisition) << "," << format_double(row.phv)
        << "," << format_double(row.r2) << "\n";
  }
}

RunTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_trace: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "# imoca-trace v1") {
    throw std::runtime_error("load_trace: bad header in " + path);
  }
  if (!std::getline(in, line) || line.rfind("# config ", 0) != 0) {
    throw std::runtime_error("load_trace: missing config echo in " + path);
  }
  RunTrace trace;
  trace.config = parse_config(line.substr(9));
  if (!std::getline(in, line)) throw std::runtime_error("load_trace: missing columns");
  const auto cols = split(line, ',');
  int d = 0, k = 0;
  for (const auto& c : cols) {
    if (c.rfind('x', 0) == 0 && c != "x") ++d;
    if (c.rfind('z', 0) == 0) ++k;
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != static_cast<std::size_t>(1 + d + 2 * k + 5)) {
      throw std::runtime_error("load_trace: bad row in " + path);
    }
    EvaluationRecord rec;
    TraceRow row;
    std::size_t c = 0;
    rec.iteration = static_cast<int>(parse_int(cells[c++]));
    rec.x.resize(d);
    for (int i = 0; i < d; ++i) rec.x[i] = parse_double(cells[c++]);
    rec.z.resize(k);
    for (int j = 0; j < k; ++j) rec.z[j] = parse_double(cells[c++]);
    rec.y.resize(k);
    for (int j = 0; j < k; ++j) rec.y[j] = parse_double(cells[c++]);
    rec.cost = parse_double(cells[c++]);
    row.cumulative_cost = parse_double(cells[c++]);
    row.acquisition = parse_double(cells[c++]);
    row.phv = parse_double(cells[c++]);
    row.r2 = parse_double(cells[c++]);
    trace.records.push_back(std::move(rec));
    trace.rows.push_back(row);
  }
  if (trace.records.empty()) throw std::runtime_error("load_trace: empty trace");
  return trace;
}

}  // namespace imoca::engine
