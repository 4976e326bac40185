#include "fdpinn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "fdpinn/errors.hpp"
#include "fdpinn/field_csv.hpp"
#include "fdpinn/metrics.hpp"
#include "fdpinn/sor.hpp"
#include "fdpinn/stencils.hpp"

namespace fdpinn {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
};

class ValueParser {
 public:
  ValueParser(const std::string& source, const Entry& e) : source_(source), e_(e) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError(source_, e_.line, "key '" + e_.key + "': " + why);
  }

  template <class T>
  T number(std::string_view token) const {
    token = trim(token);
    T v{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
      fail("cannot parse '" + std::string(token) + "' as a number");
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(v)) fail("value must be finite");
    }
    return v;
  }
  template <class T>
  T number() const { return number<T>(e_.value); }

  template <class T>
  std::vector<T> list() const {
    std::vector<T> out;
    for (auto t : split(e_.value, ',')) out.push_back(number<T>(t));
    if (out.empty()) fail("list is empty");
    return out;
  }

  bool boolean() const {
    const auto v = trim(e_.value);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail("expected true or false");
  }

 private:
  const std::string& source_;
  const Entry& e_;
};

std::string cell_label(const ResultRow& r) {
  std::ostringstream os;
  os << to_string(r.problem) << '/' << to_string(r.arm) << "/n_ini=" << r.n_ini
     << "/n_bc=" << r.n_bc << "/seed=" << r.seed;
  return os.str();
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults(PdeKind problem) {
  ExperimentConfig c;
  if (problem == PdeKind::laplace) {
    c.train = TrainConfig::laplace_defaults();
    c.n_ini = {20, 30, 50, 100, 1000};
    c.n_bc = {20};
    c.truth_source = TruthSource::sor;
  } else {
    c.train = TrainConfig::burgers_defaults();
    c.n_ini = {10, 30, 50, 100};
    c.n_bc = {};
    c.truth_source = TruthSource::fine_solver;
  }
  return c;
}

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& source) {
  std::vector<Entry> entries;
  std::set<std::string> seen;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected key = value");
    Entry e{std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))), line_no};
    if (e.key.empty()) throw ParseError(source, line_no, "empty key");
    if (!seen.insert(e.key).second) throw ParseError(source, line_no, "duplicate key '" + e.key + "'");
    entries.push_back(std::move(e));
  }

  ExperimentConfig c = defaults(PdeKind::laplace);
  for (const auto& e : entries) {
    if (e.key != "problem") continue;
    try {
      c = defaults(parse_pde_kind(e.value));
    } catch (const ConfigurationError& err) {
      throw ParseError(source, e.line, err.what());
    }
  }

  for (const auto& e : entries) {
    const ValueParser p(source, e);
    const std::string& k = e.key;
    try {
      if (k == "problem") {
        // handled above
      } else if (k == "arms") {
        c.arms.clear();
        for (auto a : split(e.value, ',')) c.arms.push_back(parse_arm(a));
      } else if (k == "n_ini") {
        c.n_ini = p.list<std::size_t>();
      } else if (k == "n_bc") {
        c.n_bc = trim(e.value) == "match" ? std::vector<std::size_t>{} : p.list<std::size_t>();
      } else if (k == "repeats") {
        c.repeats = p.number<std::size_t>();
      } else if (k == "base_seed") {
        c.base_seed = p.number<std::uint64_t>();
      } else if (k == "output_dir") {
        c.output_dir = e.value;
      } else if (k == "ground_truth") {
        if (e.value == "sor") c.truth_source = TruthSource::sor;
        else if (e.value == "csv") c.truth_source = TruthSource::csv;
        else if (e.value == "fine-solver") c.truth_source = TruthSource::fine_solver;
        else p.fail("expected sor, csv or fine-solver");
      } else if (k == "ground_truth_path") {
        c.truth_path = e.value;
      } else if (k == "fine_nx") {
        c.fine_nx = p.number<std::size_t>();
      } else if (k == "fine_nt") {
        c.fine_nt = p.number<std::size_t>();
      } else if (k == "jobs") {
        c.jobs = p.number<std::size_t>();
      } else if (k == "timed") {
        c.timed = p.boolean();
      } else if (k == "write_fields") {
        c.write_fields = p.boolean();
      } else if (k == "lambda") {
        c.train.lambda = p.number<double>();
      } else if (k == "gamma_mu") {
        c.train.gamma_mu = p.number<double>();
      } else if (k == "gamma_f") {
        c.train.gamma_f = p.number<double>();
      } else if (k == "minibatch_mu") {
        c.train.minibatch_mu = p.number<std::size_t>();
      } else if (k == "minibatch_f") {
        c.train.minibatch_f = p.number<std::size_t>();
      } else if (k == "iterations") {
        c.train.iterations = p.number<std::size_t>();
      } else if (k == "momentum") {
        c.train.momentum = p.number<double>();
      } else if (k == "architecture") {
        c.train.architecture = p.list<int>();
      } else if (k == "stencil_slope") {
        c.train.stencil_slope = p.number<double>();
      } else if (k == "exact_stencil_backprop") {
        c.train.exact_stencil_backprop = p.boolean();
      } else if (k == "eval_every") {
        c.train.eval_every = p.number<std::size_t>();
      } else {
        throw ParseError(source, e.line, "unknown key '" + k + "'");
      }
    } catch (const ConfigurationError& err) {
      throw ParseError(source, e.line, err.what());
    }
  }
  try {
    c.validate();
  } catch (const ConfigurationError& err) {
    throw ParseError(source, 0, err.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse(in, path.string());
}

void ExperimentConfig::validate() const {
  if (arms.empty()) throw ConfigurationError("arms list is empty");
  if (n_ini.empty()) throw ConfigurationError("n_ini sweep is empty");
  if (!n_bc.empty() && n_bc.size() != 1 && n_bc.size() != n_ini.size()) {
    throw ConfigurationError("n_bc needs one value, one per n_ini entry, or 'match'");
  }
  if (repeats < 1) throw ConfigurationError("repeats must be at least 1");
  if (jobs < 1) throw ConfigurationError("jobs must be at least 1");
  if (truth_source == TruthSource::csv && truth_path.empty()) {
    throw ConfigurationError("ground_truth = csv needs ground_truth_path");
  }
  if (truth_source == TruthSource::sor && train.problem != PdeKind::laplace) {
    throw ConfigurationError("the SOR ground truth only exists for the Laplace problem");
  }
  if (truth_source == TruthSource::fine_solver && train.problem != PdeKind::burgers) {
    throw ConfigurationError("the fine solver ground truth only exists for the Burgers problem");
  }
  for (const auto& point : sweep_points()) {
    TrainConfig t = train;
    t.n_ini = point.n_ini;
    t.n_bc = point.n_bc;
    t.validate();
  }
}

std::vector<ExperimentConfig::SweepPoint> ExperimentConfig::sweep_points() const {
  std::vector<SweepPoint> out;
  for (std::size_t k = 0; k < n_ini.size(); ++k) {
    std::size_t bc = n_ini[k];
    if (n_bc.size() == 1) bc = n_bc[0];
    else if (!n_bc.empty()) bc = n_bc[k];
    out.push_back({n_ini[k], bc});
  }
  return out;
}

void write_result_row(std::ostream& out, const ResultRow& r) {
  out << to_string(r.problem) << ',' << to_string(r.arm) << ',' << r.n_ini << ',' << r.n_bc << ','
      << r.n_f_effective << ',' << r.seed << ',' << format_real(r.l2) << ','
      << format_real(r.sec_per_iter) << ',' << format_real(r.gamma_f) << ','
      << format_real(r.lambda) << '\n';
}

std::vector<ResultRow> read_results_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kResultsHeader) {
    throw ParseError(source, 1, "expected header '" + std::string(kResultsHeader) + "'");
  }
  std::vector<ResultRow> rows;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) throw ParseError(source, line_no, "expected 10 columns");
    const Entry e{"row", line, line_no};
    const ValueParser p(source, e);
    ResultRow r;
    try {
      r.problem = parse_pde_kind(f[0]);
      r.arm = parse_arm(f[1]);
    } catch (const ConfigurationError& err) {
      throw ParseError(source, line_no, err.what());
    }
    r.n_ini = p.number<std::size_t>(f[2]);
    r.n_bc = p.number<std::size_t>(f[3]);
    r.n_f_effective = p.number<std::size_t>(f[4]);
    r.seed = p.number<std::uint64_t>(f[5]);
    r.l2 = p.number<double>(f[6]);
    r.sec_per_iter = p.number<double>(f[7]);
    r.gamma_f = p.number<double>(f[8]);
    r.lambda = p.number<double>(f[9]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_results_csv(in, path.string());
}

ScalarField load_ground_truth(const ExperimentConfig& config) {
  switch (config.truth_source) {
    case TruthSource::sor:
      return solve_trough(41).field;
    case TruthSource::fine_solver:
      return burgers_ground_truth(config.fine_nx, config.fine_nt);
    case TruthSource::csv: {
      ScalarField f = read_field_csv(config.truth_path);
      if (f.grid() != problem_grid(config.train.problem)) {
        throw ConfigurationError("ground truth " + config.truth_path.string() +
                                 " is not on the " + std::string(to_string(config.train.problem)) +
                                 " evaluation grid");
      }
      return f;
    }
  }
  throw ConfigurationError("unknown ground truth source");
}

std::string prediction_file_name(const ResultRow& r) {
  std::ostringstream os;
  os << to_string(r.problem) << '_' << to_string(r.arm) << "_nini" << r.n_ini << "_nbc" << r.n_bc
     << "_seed" << r.seed << ".csv";
  return os.str();
}

RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  std::ostream* log = options.log;

  RunReport report;
  report.output_dir = config.output_dir;
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) report.output_dir = env;
  if (options.output_override) report.output_dir = *options.output_override;
  const auto fields_dir = report.output_dir / "fields";
  std::filesystem::create_directories(report.output_dir);
  if (config.write_fields) std::filesystem::create_directories(fields_dir);

  const ScalarField truth = load_ground_truth(config);
  write_field_csv(truth, report.output_dir / "ground_truth.csv");
  const CollocationSet collocation = collocation_nodes(truth.grid(), config.train.problem);

  struct Cell {
    TrainConfig train;
    ResultRow row;
  };
  std::vector<Cell> cells;
  const auto points = config.sweep_points();
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (const Arm arm : config.arms) {
      for (std::size_t r = 0; r < config.repeats; ++r) {
        Cell c{config.train, {}};
        c.train.arm = arm;
        c.train.n_ini = points[p].n_ini;
        c.train.n_bc = points[p].n_bc;
        c.train.seed = config.cell_seed(p, r);
        if (options.smoke) c.train.iterations = std::min<std::size_t>(c.train.iterations, 10);
        c.row = {c.train.problem, arm,           c.train.n_ini,
                 c.train.n_bc,    arm == Arm::fdm_pinn ? collocation.size() : 0,
                 c.train.seed,    0.0,           0.0,
                 c.train.gamma_f, c.train.lambda};
        cells.push_back(std::move(c));
      }
    }
  }

  std::vector<std::optional<ResultRow>> done(cells.size());
  std::vector<std::string> errors(cells.size());
  std::mutex log_mutex;
  auto run_cell = [&](std::size_t k) {
    const Cell& cell = cells[k];
    try {
      const TrainResult result = train(cell.train, truth, collocation);
      const ScalarField pred = predict_field(result.params, truth.grid());
      ResultRow row = cell.row;
      row.l2 = l2_error(cell.train.problem, pred, truth);
      row.sec_per_iter = iteration_timer(result.history);
      if (config.write_fields) write_field_csv(pred, fields_dir / prediction_file_name(row));
      done[k] = row;
      if (log) {
        std::lock_guard lock(log_mutex);
        *log << cell_label(row) << " l2=" << format_real(row.l2) << '\n';
      }
    } catch (const std::exception& e) {
      errors[k] = cell_label(cell.row) + ": " + e.what();
      if (log) {
        std::lock_guard lock(log_mutex);
        *log << "FAILED " << errors[k] << '\n';
      }
    }
  };

  const std::size_t jobs = config.timed ? 1 : options.jobs.value_or(config.jobs);
  if (jobs <= 1) {
    for (std::size_t k = 0; k < cells.size(); ++k) run_cell(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < std::min(jobs, cells.size()); ++w) {
      workers.emplace_back([&] {
        for (std::size_t k = next++; k < cells.size(); k = next++) run_cell(k);
      });
    }
    for (auto& t : workers) t.join();
  }

  std::ofstream out(report.output_dir / "results.csv");
  if (!out) throw std::runtime_error("cannot write " + (report.output_dir / "results.csv").string());
  out << kResultsHeader << '\n';
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (done[k]) {
      write_result_row(out, *done[k]);
      report.rows.push_back(*done[k]);
    } else {
      report.failures.push_back(errors[k]);
    }
  }
  return report;
}

Summary summarize(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw ConfigurationError("no result rows to summarize");
  using Key = std::tuple<PdeKind, Arm, std::size_t, std::size_t>;
  std::vector<Key> order;
  std::map<Key, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    const Key key{r.problem, r.arm, r.n_ini, r.n_bc};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }

  auto mean_std = [](const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
  };

  Summary s;
  for (const auto& key : order) {
    const auto& g = groups[key];
    std::vector<double> l2, sec;
    for (const auto* r : g) {
      l2.push_back(r->l2);
      sec.push_back(r->sec_per_iter);
    }
    SummaryRow row;
    std::tie(row.problem, row.arm, row.n_ini, row.n_bc) = key;
    row.runs = g.size();
    std::tie(row.l2_mean, row.l2_std) = mean_std(l2);
    std::tie(row.sec_per_iter_mean, row.sec_per_iter_std) = mean_std(sec);
    s.rows.push_back(row);
  }

  // A sweep point seen for one arm of a problem should exist for all of them.
  std::set<std::tuple<PdeKind, std::size_t, std::size_t>> points;
  std::set<std::pair<PdeKind, Arm>> arms;
  for (const auto& [p, a, ni, nb] : order) {
    points.emplace(p, ni, nb);
    arms.emplace(p, a);
  }
  for (const auto& [p, a] : arms) {
    for (const auto& [pp, ni, nb] : points) {
      if (pp != p || groups.count(Key{p, a, ni, nb})) continue;
      std::ostringstream os;
      os << to_string(p) << '/' << to_string(a) << '/' << ni << '/' << nb;
      s.missing.push_back(os.str());
    }
  }
  return s;
}

void write_summary_csv(const Summary& summary, std::ostream& out) {
  out << "problem,arm,n_ini,n_bc,runs,l2_mean,l2_std,sec_per_iter_mean,sec_per_iter_std\n";
  for (const auto& r : summary.rows) {
    out << to_string(r.problem) << ',' << to_string(r.arm) << ',' << r.n_ini << ',' << r.n_bc
        << ',' << r.runs << ',' << format_real(r.l2_mean) << ',' << format_real(r.l2_std) << ','
        << format_real(r.sec_per_iter_mean) << ',' << format_real(r.sec_per_iter_std) << '\n';
  }
}

Summary summarize_file(const std::filesystem::path& results_path,
                       const std::filesystem::path& out_path) {
  const Summary s = summarize(read_results_csv(results_path));
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path.string());
  write_summary_csv(s, out);
  return s;
}

void write_params_csv(const MlpParams& params, std::ostream& out) {
  for (std::size_t k = 0; k < params.layer_sizes.size(); ++k) {
    if (k) out << ',';
    out << params.layer_sizes[k];
  }
  out << '\n';
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    const auto& w = params.tensors.weights[l];
    const auto& b = params.tensors.biases[l];
    bool first = true;
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        out << (first ? "" : ",") << format_real(w(r, c));
        first = false;
      }
    }
    for (Eigen::Index r = 0; r < b.size(); ++r) out << ',' << format_real(b(r));
    out << '\n';
  }
}

MlpParams read_params_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing layer sizes");
  const Entry head{"layer_sizes", line, 1};
  const auto sizes = ValueParser(source, head).list<int>();
  try {
    validate_layer_sizes(sizes);
  } catch (const ConfigurationError& e) {
    throw ParseError(source, 1, e.what());
  }
  MlpParams p;
  p.layer_sizes = sizes;
  p.tensors = LayerTensors::zeros(sizes);
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    const std::size_t line_no = l + 2;
    if (!std::getline(in, line)) throw ParseError(source, line_no, "missing layer");
    const Entry e{"layer", line, line_no};
    const auto values = ValueParser(source, e).list<double>();
    auto& w = p.tensors.weights[l];
    auto& b = p.tensors.biases[l];
    if (values.size() != static_cast<std::size_t>(w.size() + b.size())) {
      throw ParseError(source, line_no, "wrong number of parameters for layer");
    }
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = values[k++];
    }
    for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = values[k++];
  }
  return p;
}

}  // namespace fdpinn
