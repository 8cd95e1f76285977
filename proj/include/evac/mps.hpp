#pragma once

#include <string>
#include <vector>

#include "evac/ilp.hpp"

namespace evac {

// Canonical fixed-format MPS emission (columns in variable order, integer
// markers, OBJSENSE section). Byte-stable: the same model always yields the
// same bytes. Throws std::invalid_argument when a coefficient has no exact
// fixed-width decimal form.
std::string export_mps(const IlpModel& model);

// Parses MPS text produced by export_mps (or compatible). The result carries
// variables, rows, bounds, integrality and the objective; layout metadata is
// not part of the format.
IlpModel import_mps(const std::string& text);

// One "name value" pair per line; '#' comments allowed. Unknown variable
// names are an error. Missing variables default to zero.
std::vector<Rat> import_solution(const std::string& text, const IlpModel& model);

}  // namespace evac
