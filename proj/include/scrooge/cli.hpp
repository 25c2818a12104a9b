#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scrooge::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kNumerical = 2;
inline constexpr int kVerification = 3;

/// Runs one command line (program name excluded). Results go to `out`,
/// diagnostics to `err`. With --out DIR every output file is written there
/// together with manifest.json.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Merges `--config FILE` into the arguments: every key of the JSON object
/// becomes `--key value` unless the flag is already present. Arrays become
/// comma lists, `true` a bare flag. Throws IoError.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace scrooge::cli
