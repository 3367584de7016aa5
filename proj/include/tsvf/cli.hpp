#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tsvf/algebra.hpp"

namespace tsvf::cli {

/// Runs the command line given argv-style arguments (without the program
/// name). All output goes to the given streams; nothing is written to disk
/// unless an explicit output path was requested. Returns the process exit
/// code: 0 success, 2 usage error, 3 numeric/admissibility error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Complex literal accepted by --c and friends: "1", "-2", "0.1i", "1+2i",
/// "2i", "i", "1e-3".
cplx parse_complex_literal(const std::string& text);

/// "re+imi" with 12 significant digits, e.g. "-1+0i", "0.5-0.25i".
std::string format_complex(cplx z);

} // namespace tsvf::cli
