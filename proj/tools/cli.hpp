#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sbck::cli {

enum ExitCode : int {
  kOk = 0,
  kNegative = 1,  // non-compliant, failed property, inapplicable directive
  kUsage = 2,     // bad arguments, unreadable file, parse error
  kCap = 3,       // state cap exceeded
};

/// Runs one command line (args excludes the program name). `in` backs the
/// `-` input.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace sbck::cli
