#include "fdpinn/field_csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <istream>
#include <ostream>
#include <string_view>
#include <system_error>
#include <vector>

#include "fdpinn/errors.hpp"

namespace fdpinn {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_token(std::string_view token, const std::string& source, std::size_t line) {
  token = trim(token);
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
    throw ParseError(source, line, "cannot parse '" + std::string(token) + "' as a number");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw ParseError(source, line, "non-finite value '" + std::string(token) + "'");
    }
  }
  return value;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_field_csv(const ScalarField& field, std::ostream& out) {
  const auto& g = field.grid();
  out << g.n_i() << ',' << g.n_j() << ',' << format_real(g.range_i().min) << ','
      << format_real(g.range_i().max) << ',' << format_real(g.range_j().min) << ','
      << format_real(g.range_j().max) << '\n';
  for (std::size_t j = 0; j < g.n_j(); ++j) {
    for (std::size_t i = 0; i < g.n_i(); ++i) {
      if (i) out << ',';
      out << format_real(field(i, j));
    }
    out << '\n';
  }
}

void write_field_csv(const ScalarField& field, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_field_csv(field, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ScalarField read_field_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(source, line_no, "missing header");
  const auto head = split_commas(line);
  if (head.size() != 6) {
    throw ParseError(source, line_no, "header needs n_i,n_j,min_i,max_i,min_j,max_j");
  }
  const auto n_i = parse_token<std::size_t>(head[0], source, line_no);
  const auto n_j = parse_token<std::size_t>(head[1], source, line_no);
  const Interval ri{parse_token<double>(head[2], source, line_no),
                    parse_token<double>(head[3], source, line_no)};
  const Interval rj{parse_token<double>(head[4], source, line_no),
                    parse_token<double>(head[5], source, line_no)};
  std::optional<UniformGrid2D> grid;
  try {
    grid.emplace(n_i, n_j, ri, rj);
  } catch (const ConfigurationError& e) {
    throw ParseError(source, line_no, e.what());
  }

  std::vector<double> values;
  values.reserve(grid->size());
  for (std::size_t j = 0; j < n_j; ++j) {
    ++line_no;
    if (!std::getline(in, line)) {
      throw ParseError(source, line_no,
                       "unexpected end of file: expected " + std::to_string(n_j) +
                           " rows, found " + std::to_string(j));
    }
    const auto tokens = split_commas(line);
    if (tokens.size() != n_i) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(n_i) + " values, found " +
                           std::to_string(tokens.size()));
    }
    for (const auto t : tokens) values.push_back(parse_token<double>(t, source, line_no));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) throw ParseError(source, line_no, "trailing data after last row");
  }
  return ScalarField(*grid, std::move(values));
}

ScalarField read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  return read_field_csv(in, path.string());
}

}  // namespace fdpinn
