#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "imoca/cli/experiment.hpp"

using namespace imoca;
namespace fs = std::filesystem;

namespace {

const char* kQuickOverrides =
    "nsga_pop=16;nsga_gen=8;ref_density=40;rff=64;num_random=20;num_local=1;"
    "local_steps=4;fidelity_grid=8;quad_nodes=41";

void write_spec(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << "# imoca-spec v1\n" << body;
}

std::size_t count_traces(const std::string& dir) {
  std::size_t n = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".trace") ++n;
  }
  return n;
}

struct TempDir {
  std::string path;
  explicit TempDir(std::string p) : path(std::move(p)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("spec parsing") {
  TempDir tmp("cli_spec_test");

  SUBCASE("seed ranges and overrides expand into run configs") {
    const std::string spec = tmp.path + "/ok.spec";
    write_spec(spec,
               "output," + tmp.path + "/out\n" +
                   "branin-currin,mesmo,0..2,5,S=2;num_random=33\n" +
                   "branin-currin,imoca-t,4 7,5\n");
    const auto parsed = cli::parse_spec_file(spec);
    CHECK(parsed.runs.size() == 5);
    CHECK(parsed.runs[0].num_front_samples == 2);
    CHECK(parsed.runs[0].search.num_random == 33);
    CHECK(parsed.runs[3].seed == 4);
    CHECK(parsed.runs[4].seed == 7);
  }

  SUBCASE("empty seed list is a configuration error") {
    const std::string spec = tmp.path + "/bad.spec";
    write_spec(spec, "branin-currin,mesmo, ,5\n");
    CHECK_THROWS_AS(cli::parse_spec_file(spec), std::invalid_argument);
    CHECK(cli::cmd_run(spec, false, 1) == cli::kExitConfigError);
  }

  SUBCASE("unknown names are configuration errors listing the registry") {
    const std::string spec = tmp.path + "/unknown.spec";
    write_spec(spec, "nonesuch,mesmo,0,5\n");
    try {
      cli::parse_spec_file(spec);
      FAIL("expected a configuration error");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("branin-currin") != std::string::npos);
    }
    write_spec(spec, "branin-currin,sgd,0,5\n");
    CHECK_THROWS_AS(cli::parse_spec_file(spec), std::invalid_argument);
  }

  SUBCASE("missing header is rejected") {
    const std::string spec = tmp.path + "/hdrless.spec";
    std::ofstream(spec) << "branin-currin,mesmo,0,5\n";
    CHECK_THROWS_AS(cli::parse_spec_file(spec), std::invalid_argument);
  }
}

TEST_CASE("run command writes one trace per (problem, method, seed)") {
  TempDir tmp("cli_run_test");
  const std::string spec = tmp.path + "/grid.spec";
  const std::string out = tmp.path + "/out";
  write_spec(spec, "output," + out + "\n" +
                       "branin-currin,mesmo,0..2,0.01," + kQuickOverrides + "\n" +
                       "branin-currin,imoca-t,0..2,0.01," + kQuickOverrides + "\n" +
                       "qv,mesmo,0..2,0.01," + kQuickOverrides + "\n" +
                       "qv,imoca-t,0..2,0.01," + kQuickOverrides + "\n");
  REQUIRE(cli::cmd_run(spec, false, 2) == cli::kExitOk);
  CHECK(count_traces(out) == 12);

  SUBCASE("rerunning without --force touches nothing") {
    std::vector<fs::file_time_type> before;
    for (const auto& entry : fs::recursive_directory_iterator(out)) {
      if (entry.path().extension() == ".trace") {
        before.push_back(fs::last_write_time(entry.path()));
      }
    }
    REQUIRE(cli::cmd_run(spec, false, 2) == cli::kExitOk);
    std::vector<fs::file_time_type> after;
    for (const auto& entry : fs::recursive_directory_iterator(out)) {
      if (entry.path().extension() == ".trace") {
        after.push_back(fs::last_write_time(entry.path()));
      }
    }
    CHECK(before == after);
  }

  SUBCASE("summarize aggregates the traces") {
    REQUIRE(cli::cmd_summarize(out) == cli::kExitOk);
    CHECK(fs::exists(out + "/summary_branin-currin_mesmo.csv"));
    CHECK(fs::exists(out + "/summary_qv_imoca-t.csv"));
    CHECK(fs::exists(out + "/cost_reduction_branin-currin.csv"));
  }
}

TEST_CASE("summarize handles degenerate groups") {
  TempDir tmp("cli_summarize_test");
  const std::string spec = tmp.path + "/one.spec";
  const std::string out = tmp.path + "/out";
  write_spec(spec, "output," + out + "\n" +
                       "branin-currin,mesmo,3,0.01," + kQuickOverrides + "\n");
  REQUIRE(cli::cmd_run(spec, false, 1) == cli::kExitOk);

  SUBCASE("a single trace yields zero variance") {
    REQUIRE(cli::cmd_summarize(out) == cli::kExitOk);
    std::ifstream in(out + "/summary_branin-currin_mesmo.csv");
    std::string line;
    std::getline(in, line);  // header comment
    std::getline(in, line);  // column names
    while (std::getline(in, line)) {
      // phv_var and r2_var columns are exactly zero
      const auto c1 = line.rfind(",0,");
      CHECK(line.substr(line.size() - 2) == ",0");
      (void)c1;
    }
  }

  SUBCASE("duplicated identical traces still have zero variance") {
    const std::string src = out + "/branin-currin/mesmo_seed3.trace";
    fs::copy_file(src, out + "/branin-currin/copy.trace");
    REQUIRE(cli::cmd_summarize(out) == cli::kExitOk);
    std::ifstream in(out + "/summary_branin-currin_mesmo.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header.find("runs=2") != std::string::npos);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      CHECK(line.substr(line.size() - 2) == ",0");
    }
  }

  SUBCASE("missing directory is a configuration error") {
    CHECK(cli::cmd_summarize(tmp.path + "/nowhere") == cli::kExitConfigError);
  }
}

TEST_CASE("aggregation math on constructed traces") {
  // two hand-built traces with known step functions
  engine::RunTrace a, b;
  a.config.problem = b.config.problem = "branin-currin";
  auto add = [](engine::RunTrace& t, double cost, double phv, double r2) {
    engine::EvaluationRecord rec;
    rec.x = Eigen::Vector2d(0.5, 0.5);
    rec.z = {1.0, 1.0};
    rec.y = Eigen::Vector2d(0.0, 0.0);
    rec.cost = cost;
    t.records.push_back(rec);
    t.rows.push_back({cost == 0 ? 0.0 : (t.rows.empty() ? cost : t.rows.back().cumulative_cost + cost),
                      phv, r2, 0.0});
  };
  add(a, 10.0, 1.0, 4.0);
  add(a, 10.0, 3.0, 2.0);  // cumulative 20
  add(b, 10.0, 2.0, 3.0);
  add(b, 10.0, 2.0, 3.0);

  const auto curve = cli::aggregate_traces({a, b}, 20.0, 2);
  REQUIRE(curve.cost.size() == 2);
  CHECK(curve.cost[0] == 10.0);
  CHECK(curve.cost[1] == 20.0);
  // at cost 10: phv = {1, 2} -> mean 1.5, var 0.25
  CHECK(curve.phv_mean[0] == doctest::Approx(1.5));
  CHECK(curve.phv_var[0] == doctest::Approx(0.25));
  // at cost 20: phv = {3, 2} -> mean 2.5
  CHECK(curve.phv_mean[1] == doctest::Approx(2.5));
  CHECK(curve.r2_mean[0] == doctest::Approx(3.5));
}

TEST_CASE("selftest passes on a healthy build") {
  CHECK(cli::cmd_selftest() == cli::kExitOk);
}

TEST_CASE("oracle tolerances would catch an injected bias") {
  // the truncated term at zero is ln 2; a 1 percent bias exceeds the selftest
  // tolerance, so a mutated implementation could not slip through
  const double mc_tolerance = 5e-3;
  const double biased = std::log(2.0) * 1.01;
  CHECK(std::fabs(biased - std::log(2.0)) > mc_tolerance);
}
