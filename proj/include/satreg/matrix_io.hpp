#pragma once

#include <iosfwd>
#include <string>

#include "satreg/state_space.hpp"

namespace satreg {

// Plain-text model format. Blank lines and lines starting with '#' are
// ignored. Each block is a header "<name> <rows> <cols>" followed by
// rows*cols whitespace-separated values in row-major order:
//
//   A 2 2
//   -1 0
//   0 -2
//   Bc 2 1
//   1
//   1
//   Bd 2 0
//   C 1 2
//   1 1
//
// Required blocks: A, Bc, C. Optional: Bd (defaults to n x 0), M (gram
// weight), D (must be all zeros; feedthrough is not supported).

StateSpaceModel read_model(std::istream& in);
StateSpaceModel read_model_file(const std::string& path);

/// Writes every block with 17 significant digits; read_model restores the
/// matrices exactly.
void write_model(std::ostream& out, const StateSpaceModel& model);
void write_model_file(const std::string& path, const StateSpaceModel& model);

}  // namespace satreg
