#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "equivocation/equivocation.hpp"

namespace equivocation::cli {

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kValidation = 1,
  kUsage = 2,
  kInvariant = 3,
  kMalformed = 4,
};

/// Input is not well-formed JSON.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed JSON that does not describe a valid distribution.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

/// Reads {"nx": int, "ny": int, "probs": [[real; ny]; nx]}.
JointDistribution parse_distribution(std::string_view text);

Json to_json(const JointDistribution& joint);
Json to_json(const DistributionPair& pair);
Json to_json(const TrialReport& report);

/// One JSON-lines record: {"label", "tv", "gap", "s"?, "p"?, "q"?}.
Json to_json(const WalkStep& step);

/// Runs one subcommand. JSON goes to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace equivocation::cli
