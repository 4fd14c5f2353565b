#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace gseg3d::cli {

/// Environment variable naming a config file used when --config is absent.
inline constexpr const char* kConfigEnvVar = "GSEG3D_CONFIG";

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kPartial = 2,
};

/// Entry point of the `gseg3d` tool. `args` excludes the program name.
/// Results go to `out`; diagnostics ("error: <what>: <why>") go to `err` only.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace gseg3d::cli
