#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fdpinn/burgers_reference.hpp"
#include "fdpinn/errors.hpp"
#include "fdpinn/experiment.hpp"
#include "fdpinn/field_csv.hpp"
#include "fdpinn/sor.hpp"
#include "fdpinn/stencils.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Finite-difference physics-informed network experiments"};
  app.require_subcommand(1);

  std::string config_path;
  bool smoke = false;
  std::optional<std::size_t> jobs;
  std::optional<std::string> output;
  auto* run = app.add_subcommand("run", "train every cell of a sweep config");
  run->add_option("config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
  run->add_flag("--smoke", smoke, "cap every run at 10 iterations");
  run->add_option("-j,--jobs", jobs, "concurrent cells for untimed sweeps");
  run->add_option("-o,--output", output, "output directory (overrides config and env)");

  std::string results_path;
  std::optional<std::string> summary_out;
  auto* summarize = app.add_subcommand("summarize", "mean and std per sweep cell");
  summarize->add_option("results", results_path, "results.csv")->required()->check(CLI::ExistingFile);
  summarize->add_option("-o,--output", summary_out, "summary csv (default: next to results)");

  std::string problem_name, truth_out;
  std::size_t fine_nx = fdpinn::kDefaultFineNx, fine_nt = fdpinn::kDefaultFineNt;
  auto* gen = app.add_subcommand("gen-truth", "write the reference field as csv");
  gen->add_option("problem", problem_name, "laplace or burgers")->required();
  gen->add_option("out", truth_out, "output csv")->required();
  gen->add_option("--fine-nx", fine_nx, "burgers fine grid x nodes");
  gen->add_option("--fine-nt", fine_nt, "burgers fine grid t nodes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto config = fdpinn::ExperimentConfig::load(config_path);
      fdpinn::RunOptions opts;
      opts.smoke = smoke;
      opts.jobs = jobs;
      if (output) opts.output_override = fs::path(*output);
      opts.log = &std::clog;
      const auto report = fdpinn::run_experiment(config, opts);
      std::cout << report.rows.size() << " rows written to "
                << (report.output_dir / "results.csv").string() << '\n';
      for (const auto& f : report.failures) std::cerr << "failed: " << f << '\n';
      return report.exit_code();
    }
    if (*summarize) {
      const fs::path out = summary_out ? fs::path(*summary_out)
                                       : fs::path(results_path).parent_path() / "summary.csv";
      const auto s = fdpinn::summarize_file(results_path, out);
      fdpinn::write_summary_csv(s, std::cout);
      for (const auto& m : s.missing) std::cerr << "missing cell: " << m << '\n';
      return s.missing.empty() ? 0 : 1;
    }
    if (*gen) {
      const auto kind = fdpinn::parse_pde_kind(problem_name);
      const fdpinn::ScalarField truth = kind == fdpinn::PdeKind::laplace
                                            ? fdpinn::solve_trough(41).field
                                            : fdpinn::burgers_ground_truth(fine_nx, fine_nt);
      fdpinn::write_field_csv(truth, truth_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
