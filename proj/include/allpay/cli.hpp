#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage or config error,
// 2 solver error, 3 verification failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace allpay {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace allpay
