#pragma once

#include <iosfwd>

namespace fxp {

// Parses argv, dispatches one query, renders the report on `out`.
// Exit codes: 0 success, 1 usage/flag error, 2 parse/validation error,
// 3 infeasible query, 4 resource cap exceeded.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fxp
