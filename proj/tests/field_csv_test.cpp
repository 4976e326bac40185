#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "fdpinn/burgers_reference.hpp"
#include "fdpinn/errors.hpp"
#include "fdpinn/field_csv.hpp"
#include "fdpinn/sor.hpp"

using namespace fdpinn;

namespace {

ScalarField roundtrip(const ScalarField& f) {
  std::stringstream ss;
  write_field_csv(f, ss);
  return read_field_csv(ss);
}

ScalarField parse(const std::string& text) {
  std::istringstream in(text);
  return read_field_csv(in, "mem");
}

int parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return static_cast<int>(e.line());
  }
  return -1;
}

}  // namespace

TEST(FormatReal, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.25), "0.25");
  EXPECT_EQ(format_real(1.0), "1");
  EXPECT_EQ(format_real(-0.1), "-0.1");
  const double awkward = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_real(awkward)), awkward);
  const double tiny = std::numeric_limits<double>::denorm_min();
  EXPECT_EQ(std::strtod(format_real(tiny).c_str(), nullptr), tiny);
}

TEST(FieldCsv, SorTroughRoundTrips) {
  const ScalarField f = solve_trough(41).field;
  EXPECT_EQ(roundtrip(f), f);
}

TEST(FieldCsv, AnisotropicBurgersGridRoundTrips) {
  const auto grid = burgers_eval_grid();
  const ScalarField f = field_from_fn(grid, [](double x, double t) { return std::exp(-t) * std::sin(3.0 * x); });
  const ScalarField back = roundtrip(f);
  EXPECT_EQ(back.grid(), grid);
  EXPECT_EQ(back, f);
}

TEST(FieldCsv, ConstantQuarterParsesExactly) {
  const ScalarField f(make_grid(5, 4, {0, 1}, {0, 1}), 0.25);
  std::stringstream ss;
  write_field_csv(f, ss);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "5,4,0,1,0,1");
  int rows = 0;
  while (std::getline(ss, line)) {
    EXPECT_EQ(line, "0.25,0.25,0.25,0.25,0.25");
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}

TEST(FieldCsv, RowsAreConstantJ) {
  ScalarField f(make_grid(3, 3, {0, 1}, {0, 1}));
  f(2, 0) = 7.0;
  std::stringstream ss;
  write_field_csv(f, ss);
  std::string header, row0;
  std::getline(ss, header);
  std::getline(ss, row0);
  EXPECT_EQ(row0, "0,0,7");
}

TEST(FieldCsv, MissingRowReportsEndOfFile) {
  const ScalarField f(trough_grid(41), 0.5);
  std::stringstream ss;
  write_field_csv(f, ss);
  std::string text = ss.str();
  text.erase(text.rfind('\n', text.size() - 2) + 1);  // drop the last row
  try {
    parse(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 42u);  // header + 40 rows, then EOF
    EXPECT_NE(std::string(e.what()).find("end of file"), std::string::npos);
  }
}

TEST(FieldCsv, MalformedContentNamesTheLine) {
  EXPECT_EQ(parse_error_line("3,3,0,1\n"), 1);
  EXPECT_EQ(parse_error_line("3,3,0,1,0,1\n0,0,0\n0,x,0\n0,0,0\n"), 3);
  EXPECT_EQ(parse_error_line("3,3,0,1,0,1\n0,0,0\n0,0\n0,0,0\n"), 3);
  EXPECT_EQ(parse_error_line("3,3,0,1,0,1\n0,0,0\n0,0,0\n0,0,0\n1,1,1\n"), 5);
  EXPECT_EQ(parse_error_line("2,3,0,1,0,1\n"), 1);  // too few nodes for a grid
}

TEST(FieldCsv, FileIoSurfacesThePath) {
  const auto dir = std::filesystem::temp_directory_path() / "fdpinn_csv_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "f.csv";
  const ScalarField f(make_grid(4, 3, {-1, 1}, {0, 2}), -1.5);
  write_field_csv(f, path);
  EXPECT_EQ(read_field_csv(path), f);
  try {
    read_field_csv(dir / "absent.csv");
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("absent.csv"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}
