#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tdyn {

// Exit codes: 0 success, 1 domain error, 2 I/O, schema or usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tdyn
