#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fdpinn/grid.hpp"

namespace fdpinn {

// Field CSV layout:
//   n_i,n_j,min_i,max_i,min_j,max_j
//   then n_j rows, row j holding n_i comma-separated values with i ascending.
// Reals use the shortest representation that round-trips.

/// Shortest round-trip decimal text for a double.
std::string format_real(double v);

void write_field_csv(const ScalarField& field, std::ostream& out);
/// Throws std::runtime_error naming the path if the file cannot be written.
void write_field_csv(const ScalarField& field, const std::filesystem::path& path);

/// Throws ParseError (with line number) for malformed content.
ScalarField read_field_csv(std::istream& in, const std::string& source = "<stream>");
ScalarField read_field_csv(const std::filesystem::path& path);

inline ScalarField load_field_csv(const std::filesystem::path& path) { return read_field_csv(path); }

}  // namespace fdpinn
