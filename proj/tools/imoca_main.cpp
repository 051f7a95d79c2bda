#include <CLI11.hpp>

#include "imoca/cli/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"continuous-fidelity multi-objective Bayesian optimization runner"};
  app.require_subcommand(1);

  std::string spec_path;
  bool force = false;
  int jobs = 0;
  auto* run = app.add_subcommand("run", "execute every run declared in a spec file");
  run->add_option("spec", spec_path, "experiment spec file")->required();
  run->add_flag("--force", force, "rerun even when the trace file already exists");
  run->add_option("--jobs", jobs, "worker count (default: logical cores)");

  std::string output_dir;
  auto* summarize =
      app.add_subcommand("summarize", "aggregate trace files into summary tables");
  summarize->add_option("dir", output_dir, "directory containing .trace files")
      ->required();

  auto* selftest =
      app.add_subcommand("selftest", "run the numerical oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? imoca::cli::kExitOk : imoca::cli::kExitConfigError;
  }

  try {
    if (run->parsed()) return imoca::cli::cmd_run(spec_path, force, jobs);
    if (summarize->parsed()) return imoca::cli::cmd_summarize(output_dir);
    if (selftest->parsed()) return imoca::cli::cmd_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return imoca::cli::kExitRunFailure;
  }
  return imoca::cli::kExitConfigError;
}
