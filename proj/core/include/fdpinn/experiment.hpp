#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdpinn/burgers_reference.hpp"
#include "fdpinn/grid.hpp"
#include "fdpinn/mlp.hpp"
#include "fdpinn/training.hpp"

namespace fdpinn {

enum class TruthSource { sor, csv, fine_solver };

/// A full sweep: every (sweep point, arm, repeat) cell is one training run.
///
/// Config files are flat `key = value` lines; `#` starts a comment and
/// lists are comma-separated. Setting `problem` first selects that
/// problem's defaults for every other key.
struct ExperimentConfig {
  TrainConfig train;
  std::vector<Arm> arms{Arm::nn_only, Arm::fdm_pinn};
  std::vector<std::size_t> n_ini{20, 30, 50, 100, 1000};
  // Empty means "same as n_ini" (paired sweep).
  std::vector<std::size_t> n_bc{20};
  std::size_t repeats = 10;
  std::uint64_t base_seed = 0;
  std::filesystem::path output_dir = "results";
  TruthSource truth_source = TruthSource::sor;
  std::filesystem::path truth_path;
  std::size_t fine_nx = kDefaultFineNx;
  std::size_t fine_nt = kDefaultFineNt;
  std::size_t jobs = 1;
  // Timed sweeps run one cell at a time regardless of `jobs`.
  bool timed = true;
  bool write_fields = true;

  static ExperimentConfig defaults(PdeKind problem);

  /// Throws ParseError naming the line for unknown keys, duplicates or bad values.
  static ExperimentConfig parse(std::istream& in, const std::string& source = "<config>");
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Throws ConfigurationError for empty sweeps or zero repeats.
  void validate() const;

  struct SweepPoint {
    std::size_t n_ini;
    std::size_t n_bc;
  };
  std::vector<SweepPoint> sweep_points() const;

  /// base_seed + point_index * 1000 + repeat. Both arms of a point share it.
  std::uint64_t cell_seed(std::size_t point_index, std::size_t repeat) const noexcept {
    return base_seed + point_index * 1000 + repeat;
  }
};

struct ResultRow {
  PdeKind problem = PdeKind::laplace;
  Arm arm = Arm::nn_only;
  std::size_t n_ini = 0;
  std::size_t n_bc = 0;
  std::size_t n_f_effective = 0;
  std::uint64_t seed = 0;
  double l2 = 0.0;
  double sec_per_iter = 0.0;
  double gamma_f = 0.0;
  double lambda = 0.0;
};

inline constexpr const char* kResultsHeader =
    "problem,arm,n_ini,n_bc,n_f_effective,seed,l2,sec_per_iter,gamma_f,lambda";

void write_result_row(std::ostream& out, const ResultRow& row);
/// Throws ParseError for a malformed header or row.
std::vector<ResultRow> read_results_csv(std::istream& in, const std::string& source = "<results>");
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

struct RunOptions {
  bool smoke = false;  // cap iterations at 10
  std::optional<std::filesystem::path> output_override;
  std::optional<std::size_t> jobs;
  std::ostream* log = nullptr;
};

struct RunReport {
  std::filesystem::path output_dir;
  std::vector<ResultRow> rows;
  std::vector<std::string> failures;

  int exit_code() const noexcept { return failures.empty() ? 0 : 1; }
};

/// Environment variable that replaces the configured output directory.
inline constexpr const char* kOutputRootEnv = "FDPINN_OUTPUT_ROOT";

/// Builds the ground truth for the config's problem and source.
ScalarField load_ground_truth(const ExperimentConfig& config);

/// Trains and evaluates every cell, writing results.csv, ground_truth.csv
/// and (if enabled) fields/<cell>.csv predictions. A failing cell is logged
/// and recorded in RunReport::failures; the remaining cells still run.
RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// File name of a cell's predicted field under <output>/fields/.
std::string prediction_file_name(const ResultRow& row);

struct SummaryRow {
  PdeKind problem = PdeKind::laplace;
  Arm arm = Arm::nn_only;
  std::size_t n_ini = 0;
  std::size_t n_bc = 0;
  std::size_t runs = 0;
  double l2_mean = 0.0;
  double l2_std = 0.0;  // sample standard deviation, 0 for one run
  double sec_per_iter_mean = 0.0;
  double sec_per_iter_std = 0.0;
};

struct Summary {
  std::vector<SummaryRow> rows;
  // "problem/arm/n_ini/n_bc" cells present for some arm but absent for another.
  std::vector<std::string> missing;
};

/// Groups rows by (problem, arm, n_ini, n_bc) in first-seen order.
/// Throws ConfigurationError for an empty input.
Summary summarize(const std::vector<ResultRow>& rows);

void write_summary_csv(const Summary& summary, std::ostream& out);

/// Reads results, writes the summary to `out_path`. Nothing is written if
/// the results are empty or unreadable.
Summary summarize_file(const std::filesystem::path& results_path,
                       const std::filesystem::path& out_path);

/// Flat parameter snapshot: first line layer sizes, then one line per
/// layer with the row-major weights followed by the biases.
void write_params_csv(const MlpParams& params, std::ostream& out);
MlpParams read_params_csv(std::istream& in, const std::string& source = "<params>");

}  // namespace fdpinn
