#include "imoca/engine/engine.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace imoca::engine {

std::string method_name(Method m) {
  switch (m) {
    case Method::kImocaT: return "imoca-t";
    case Method::kImocaE: return "imoca-e";
    case Method::kNaiveCfmo: return "naive-cfmo";
    case Method::kMesmo: return "mesmo";
  }
  throw std::logic_error("method_name: bad enum");
}

Method method_from_name(const std::string& name) {
  if (name == "imoca-t") return Method::kImocaT;
  if (name == "imoca-e") return Method::kImocaE;
  if (name == "naive-cfmo") return Method::kNaiveCfmo;
  if (name == "mesmo") return Method::kMesmo;
  std::string known;
  for (const auto& n : method_names()) known += " " + n;
  throw std::invalid_argument("unknown method '" + name + "'; registered:" + known);
}

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names = {"imoca-t", "imoca-e", "naive-cfmo",
                                                 "mesmo"};
  return names;
}

void RunConfig::validate() const {
  if (budget <= 0.0) throw std::invalid_argument("RunConfig: budget must be > 0");
  if (num_front_samples < 1) throw std::invalid_argument("RunConfig: S must be >= 1");
  if (init_count < 1) throw std::invalid_argument("RunConfig: init_count must be >= 1");
  if (rff_features < 1 || fidelity_grid < 1 || quad_nodes < 3 || quad_nodes % 2 == 0) {
    throw std::invalid_argument("RunConfig: bad sampling/quadrature settings");
  }
}

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t a = 0,
                          std::uint64_t b = 0) {
  std::uint64_t h = Rng::mix(seed ^ Rng::mix(tag));
  h = Rng::mix(h ^ Rng::mix(a));
  return Rng::mix(h ^ Rng::mix(b));
}

// stream tags
constexpr std::uint64_t kTagInitX = 1;
constexpr std::uint64_t kTagInitZ = 2;
constexpr std::uint64_t kTagHyperfit = 3;
constexpr std::uint64_t kTagRff = 4;
constexpr std::uint64_t kTagFrontNsga = 5;
constexpr std::uint64_t kTagRecovered = 6;
constexpr std::uint64_t kTagSearch = 7;

struct Standardizer {
  double mean = 0.0;
  double scale = 1.0;
  double fwd(double y) const { return (y - mean) / scale; }
  double inv(double v) const { return v * scale + mean; }
};

std::vector<double> make_grid(int grid_points) {
  std::vector<double> g;
  g.reserve(grid_points + 1);
  for (int i = 0; i < grid_points; ++i) g.push_back(static_cast<double>(i) / grid_points);
  g.push_back(1.0);
  return g;
}

// Per-run mutable state shared by the per-method selection strategies.
struct RunState {
  const RunConfig* config = nullptr;
  const bench::BenchmarkProblem* problem = nullptr;
  const bench::ReferenceData* reference = nullptr;

  std::vector<EvaluationRecord> records;
  // per-objective training views of the shared records
  std::vector<std::vector<cfgp::TrainingPoint>> train_points;
  std::vector<std::vector<double>> train_values_raw;

  std::vector<Standardizer> standardizers;
  std::vector<cfgp::KernelParams> hyperparams;
  std::vector<cfgp::CfGpModel> models;

  int records_since_hyperfit = 0;
  bool hyperfit_done = false;
  double cumulative_cost = 0.0;

  int dim() const { return problem->dim; }
  int objectives() const { return problem->num_objectives; }

  void append_record(EvaluationRecord record) {
    const int k = objectives();
    for (int j = 0; j < k; ++j) {
      train_points[j].push_back({record.x, record.z[j]});
      train_values_raw[j].push_back(record.y[j]);
    }
    cumulative_cost += record.cost;
    ++records_since_hyperfit;
    records.push_back(std::move(record));
  }

  void refit_models() {
    const int k = objectives();
    for (int j = 0; j < k; ++j) {
      const auto& raw = train_values_raw[j];
      const Eigen::Map<const Eigen::VectorXd> y(raw.data(),
                                                static_cast<Eigen::Index>(raw.size()));
      Standardizer st;
      st.mean = y.mean();
      const double var = (y.array() - st.mean).square().sum() /
                         std::max<Eigen::Index>(1, y.size());
      st.scale = std::sqrt(var);
      if (!(st.scale > 1e-12)) st.scale = 1.0;
      standardizers[j] = st;
      Eigen::VectorXd v = (y.array() - st.mean) / st.scale;
      models[j] = cfgp::CfGpModel::fit(train_points[j], v, hyperparams[j]);
    }
  }

  void maybe_refit_hyperparams() {
    if (records.size() < 2) return;
    if (hyperfit_done && records_since_hyperfit < config->hyperfit_interval) return;
    const int k = objectives();
    for (int j = 0; j < k; ++j) {
      const auto& raw = train_values_raw[j];
      const Eigen::Map<const Eigen::VectorXd> y(raw.data(),
                                                static_cast<Eigen::Index>(raw.size()));
      const double mean = y.mean();
      double scale = std::sqrt((y.array() - mean).square().sum() /
                               std::max<Eigen::Index>(1, y.size()));
      if (!(scale > 1e-12)) scale = 1.0;
      const Eigen::VectorXd v = (y.array() - mean) / scale;
      cfgp::HyperfitConfig hcfg;
      hcfg.seed = derive_seed(config->seed, kTagHyperfit, records.size(), j);
      hyperparams[j] = cfgp::fit_hyperparams(train_points[j], v, hcfg).params;
    }
    hyperfit_done = true;
    records_since_hyperfit = 0;
  }

  std::vector<pareto::ParetoFrontSample> sample_fronts(int t) {
    std::vector<pareto::ParetoFrontSample> fronts;
    fronts.reserve(config->num_front_samples);
    for (int s = 0; s < config->num_front_samples; ++s) {
      std::vector<cfgp::SampledFunction> draws;
      draws.reserve(objectives());
      for (int j = 0; j < objectives(); ++j) {
        draws.push_back(models[j].sample_posterior_function(
            config->rff_features, derive_seed(config->seed, kTagRff, t * 64 + s, j)));
      }
      std::vector<pareto::ObjectiveFn> sampled;
      for (int j = 0; j < objectives(); ++j) {
        sampled.push_back(
            [fn = draws[j]](const Eigen::VectorXd& x) { return fn(x, 1.0); });
      }
      pareto::Nsga2Config nsga;
      nsga.population = config->nsga_population;
      nsga.generations = config->nsga_generations;
      nsga.seed = derive_seed(config->seed, kTagFrontNsga, t, s);
      fronts.push_back(pareto::nsga2_solve(sampled, dim(), nsga).front);
    }
    return fronts;
  }

  fidelity::FidelityReductionConfig reduction_config(
      int j, const std::vector<double>& grid) const {
    fidelity::FidelityReductionConfig cfg;
    cfg.bandwidth_z = models[j].params().bandwidth_z;
    cfg.cost = problem->cost[j];
    cfg.input_dim = dim();
    cfg.candidate_grid = grid;
    return cfg;
  }
};

// Caches per-input posterior profiles so that enumerating fidelity
// combinations and re-testing admissibility touch the GP once per input.
class JointScorer {
 public:
  JointScorer(const RunState& state,
              const std::vector<pareto::ParetoFrontSample>& fronts, int t,
              bool extended, const acq::QuadConfig& quad)
      : state_(state), fronts_(fronts), t_(t), extended_(extended), quad_(quad) {
    const int k = state_.objectives();
    const auto grid = make_grid(state_.config->fidelity_grid);
    grids_.resize(k);
    caches_.resize(k);
    profiles_.resize(k);
    terms_.resize(k);
    for (int j = 0; j < k; ++j) {
      grids_[j] = state_.problem->full_fidelity_set(j, grid);
      caches_[j] = state_.models[j].make_zgrid_cache(grids_[j]);
    }
  }

  std::vector<std::vector<double>> admissible(const Eigen::VectorXd& x) {
    ensure(x);
    std::vector<std::vector<double>> out(state_.objectives());
    for (int j = 0; j < state_.objectives(); ++j) {
      if (state_.problem->discrete_fidelity) {
        out[j] = state_.problem->fidelity_levels[j];
      } else {
        out[j] = fidelity::reduced_set_from_stds(
            x, t_, profiles_[j].std, state_.reduction_config(j, grids_[j]));
      }
    }
    return out;
  }

  double score(const Eigen::VectorXd& x, const std::vector<double>& z) {
    ensure(x);
    const int k = state_.objectives();
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
      total += summand(j, index_of(j, z[j]));
    }
    const double cost = state_.problem->normalized_cost(x, z);
    return total / (cost * static_cast<double>(fronts_.size()));
  }

 private:
  void ensure(const Eigen::VectorXd& x) {
    if (has_x_ && x.size() == x_.size() && (x.array() == x_.array()).all()) return;
    x_ = x;
    has_x_ = true;
    for (int j = 0; j < state_.objectives(); ++j) {
      profiles_[j] = state_.models[j].profile(caches_[j], x);
      terms_[j].assign(grids_[j].size(), std::numeric_limits<double>::quiet_NaN());
    }
  }

  std::size_t index_of(int j, double z) const {
    const auto& grid = grids_[j];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] == z) return i;
    }
    throw std::logic_error("JointScorer: fidelity not on the candidate grid");
  }

  double summand(int j, std::size_t idx) {
    double& slot = terms_[j][idx];
    if (!std::isnan(slot)) return slot;
    const auto& prof = profiles_[j];
    const double floor = kStdFloor;
    const double std_g = std::max(prof.std[static_cast<Eigen::Index>(idx)], floor);
    if (extended_) {
      const double std_f = std::max(prof.std_top, floor);
      const double tau = acq::clamp_tau(
          prof.cross_top[static_cast<Eigen::Index>(idx)] / (std_g * std_f));
      slot = acq::esg_entropy_sum(fronts_, j, tau, prof.mean_top, std_f, quad_);
    } else {
      slot = acq::truncated_entropy_sum(
          fronts_, j, prof.mean[static_cast<Eigen::Index>(idx)], std_g);
    }
    return slot;
  }

  static constexpr double kStdFloor = 1e-9;

  const RunState& state_;
  const std::vector<pareto::ParetoFrontSample>& fronts_;
  int t_;
  bool extended_;
  acq::QuadConfig quad_;
  std::vector<std::vector<double>> grids_;
  std::vector<cfgp::CfGpModel::ZGridCache> caches_;
  std::vector<cfgp::CfGpModel::Profile> profiles_;
  std::vector<std::vector<double>> terms_;
  Eigen::VectorXd x_;
  bool has_x_ = false;
};

double mesmo_score_of(const RunState& state,
                      const std::vector<pareto::ParetoFrontSample>& fronts,
                      const Eigen::VectorXd& x) {
  double total = 0.0;
  for (int j = 0; j < state.objectives(); ++j) {
    const auto [mean_f, std_f] = state.models[j].posterior(x, 1.0);
    total += acq::truncated_entropy_sum(fronts, j, mean_f, std::max(std_f, 1e-9));
  }
  return total / static_cast<double>(fronts.size());
}

struct Selection {
  Eigen::VectorXd x;
  std::vector<double> z;
  double acquisition = 0.0;
};

Selection select_imoca(RunState& state,
                       const std::vector<pareto::ParetoFrontSample>& fronts, int t) {
  acq::QuadConfig quad;
  quad.nodes = state.config->quad_nodes;
  JointScorer scorer(state, fronts, t, state.config->method == Method::kImocaE, quad);
  opt::SearchConfig search = state.config->search;
  search.seed = derive_seed(state.config->seed, kTagSearch, t);
  const opt::JointResult r = opt::maximize_joint(
      [&scorer](const Eigen::VectorXd& x, const std::vector<double>& z) {
        return scorer.score(x, z);
      },
      [&scorer](const Eigen::VectorXd& x) { return scorer.admissible(x); },
      state.dim(), search);

  // admissibility audit at the selected input
  const auto sets = scorer.admissible(r.x);
  for (int j = 0; j < state.objectives(); ++j) {
    bool member = false;
    for (double z : sets[j]) member = member || z == r.z[j];
    if (!member) throw std::logic_error("iMOCA selected an inadmissible fidelity");
  }
  return {r.x, r.z, r.score};
}

Selection select_mesmo(RunState& state,
                       const std::vector<pareto::ParetoFrontSample>& fronts, int t) {
  opt::SearchConfig search = state.config->search;
  search.seed = derive_seed(state.config->seed, kTagSearch, t);
  const opt::InputResult r = opt::maximize_input_only(
      [&state, &fronts](const Eigen::VectorXd& x) {
        return mesmo_score_of(state, fronts, x);
      },
      state.dim(), search);
  return {r.x, std::vector<double>(state.objectives(), 1.0), r.score};
}

Selection select_naive(RunState& state,
                       const std::vector<pareto::ParetoFrontSample>& fronts, int t) {
  Selection sel = select_mesmo(state, fronts, t);
  const auto grid = make_grid(state.config->fidelity_grid);
  for (int j = 0; j < state.objectives(); ++j) {
    std::vector<double> admissible;
    if (state.problem->discrete_fidelity) {
      admissible = state.problem->fidelity_levels[j];
    } else {
      admissible = fidelity::reduced_set(sel.x, t, state.models[j],
                                         state.reduction_config(j, grid));
    }
    sel.z[j] = opt::cheapest_admissible(sel.x, admissible, state.problem->cost[j]);
  }
  return sel;
}

}  // namespace

pareto::ParetoFrontSample recovered_front_of_means(
    const std::vector<cfgp::CfGpModel>& models, const std::vector<double>& value_means,
    const std::vector<double>& value_scales, int dim, int nsga_population,
    int nsga_generations, std::uint64_t seed) {
  std::vector<pareto::ObjectiveFn> objectives;
  for (std::size_t j = 0; j < models.size(); ++j) {
    objectives.push_back([&models, &value_means, &value_scales, j](const Eigen::VectorXd& x) {
      return models[j].posterior_mean(x, 1.0) * value_scales[j] + value_means[j];
    });
  }
  pareto::Nsga2Config nsga;
  nsga.population = nsga_population;
  nsga.generations = nsga_generations;
  nsga.seed = seed;
  return pareto::nsga2_solve(objectives, dim, nsga).front;
}

namespace {

void append_metrics_row(RunState& state, double acquisition, int iteration,
                        RunTrace& trace) {
  std::vector<double> means(state.objectives()), scales(state.objectives());
  for (int j = 0; j < state.objectives(); ++j) {
    means[j] = state.standardizers[j].mean;
    scales[j] = state.standardizers[j].scale;
  }
  const auto recovered = recovered_front_of_means(
      state.models, means, scales, state.dim(), state.config->nsga_population,
      state.config->nsga_generations,
      derive_seed(state.config->seed, kTagRecovered, state.records.size()));

  // PHV over the points that clear the persisted reference point
  std::vector<pareto::ObjectiveVector> dominating;
  for (const auto& p : recovered.points) {
    if ((p.array() > state.reference->phv_reference_point.array()).all()) {
      dominating.push_back(p);
    }
  }
  double phv = 0.0;
  if (!dominating.empty()) {
    metrics::HypervolumeConfig hv_cfg{state.reference->phv_reference_point};
    phv = metrics::hypervolume(pareto::nondominated_filter(dominating), hv_cfg);
  }
  const double r2 = metrics::r2_distance(state.reference->front, recovered);

  trace.rows.push_back({state.cumulative_cost, phv, r2, acquisition});
  trace.recovered_front = recovered;
  (void)iteration;
}

}  // namespace

RunTrace run(const RunConfig& config, const bench::BenchmarkProblem& problem,
             const bench::ReferenceData& reference) {
  config.validate();
  if (problem.name != config.problem) {
    throw std::invalid_argument("run: problem/config mismatch");
  }
  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&started] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
        .count();
  };

  RunState state;
  state.config = &config;
  state.problem = &problem;
  state.reference = &reference;
  const int k = problem.num_objectives;
  state.train_points.resize(k);
  state.train_values_raw.resize(k);
  state.standardizers.resize(k);
  state.hyperparams.assign(k, cfgp::KernelParams::defaults(problem.dim));
  state.models.resize(k, cfgp::CfGpModel::prior(cfgp::KernelParams::defaults(problem.dim)));

  RunTrace trace;
  trace.config = config;

  // init block: Latin-hypercube inputs at random admissible fidelities
  // (top fidelity only for the single-fidelity baseline)
  Rng init_x_rng(derive_seed(config.seed, kTagInitX));
  Rng init_z_rng(derive_seed(config.seed, kTagInitZ));
  const auto init_points = opt::latin_hypercube(config.init_count, problem.dim, init_x_rng);
  const auto grid = make_grid(config.fidelity_grid);
  for (const auto& x : init_points) {
    std::vector<double> z(k, 1.0);
    if (config.method != Method::kMesmo) {
      for (int j = 0; j < k; ++j) {
        const auto& choices = problem.full_fidelity_set(j, grid);
        z[j] = choices[init_z_rng.index(choices.size())];
      }
    }
    EvaluationRecord record;
    record.x = x;
    record.z = z;
    record.y = problem.evaluate(x, z);
    record.cost = problem.normalized_cost(x, z);
    record.iteration = 0;
    record.wall_time_s = elapsed();
    state.append_record(std::move(record));
    state.refit_models();
    append_metrics_row(state, 0.0, 0, trace);
  }

  // BO loop; the final admitted evaluation may overshoot the budget
  int t = 0;
  while (state.cumulative_cost < config.budget) {
    ++t;
    state.maybe_refit_hyperparams();
    state.refit_models();
    const auto fronts = state.sample_fronts(t);

    Selection sel;
    switch (config.method) {
      case Method::kImocaT:
      case Method::kImocaE:
        sel = select_imoca(state, fronts, t);
        break;
      case Method::kNaiveCfmo:
        sel = select_naive(state, fronts, t);
        break;
      case Method::kMesmo:
        sel = select_mesmo(state, fronts, t);
        break;
    }

    EvaluationRecord record;
    record.x = sel.x;
    record.z = sel.z;
    record.y = problem.evaluate(sel.x, sel.z);
    record.cost = problem.normalized_cost(sel.x, sel.z);
    record.iteration = t;
    record.wall_time_s = elapsed();
    state.append_record(std::move(record));
    state.refit_models();
    append_metrics_row(state, sel.acquisition, t, trace);
  }

  trace.records = std::move(state.records);
  return trace;
}

}  // namespace imoca::engine
