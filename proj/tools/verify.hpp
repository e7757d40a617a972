#pragma once

#include <ostream>
#include <string>

#include "config.hpp"

namespace topokinetic::cli {

struct VerifyOutcome {
  bool passed = false;
  std::string summary;
  std::string file;  // CSV name inside the output directory
};

/// Runs the suite named in doc["verify"]["suite"] and writes its CSV to `csv`.
/// Throws ConfigError for unknown suites or parameters the suite cannot use.
VerifyOutcome run_verify(const Json& doc, std::ostream& csv);

/// Output file name for a suite.
std::string verify_file_name(const Json& doc);

}  // namespace topokinetic::cli
