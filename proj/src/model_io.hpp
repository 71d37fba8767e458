#pragma once

#include <iosfwd>
#include <string>

#include "model.hpp"

namespace tcbo {

// Text serialization, format "tcbo-model v1":
//
//   tcbo-model v1
//   <var_count>
//   <cardinalities, whitespace separated>
//   <factor_count>
//   scope: <i> <j> ...
//   <table entries, whitespace separated, last scope variable fastest>
//   ... one scope/table pair per factor ...
//
// Values are written with 17 significant digits so doubles round-trip
// bit-exactly. Parse failures report the offending line number.
void save_model(const DiscreteModel& m, std::ostream& os);
void save_model_file(const DiscreteModel& m, const std::string& path);
DiscreteModel load_model(std::istream& is);
DiscreteModel load_model_file(const std::string& path);

}  // namespace tcbo
