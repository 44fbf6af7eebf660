#ifndef GMHP_CLI_HPP
#define GMHP_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "gmhp/config.hpp"

namespace gmhp {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitGateFailure = 2;
inline constexpr int kExitTruncation = 3;

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::optional<std::string> out_dir;
};

int cmd_simulate(const RunConfig& config, const CliOverrides& overrides,
                 std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& config, const CliOverrides& overrides,
                 std::ostream& out, std::ostream& err);
int cmd_trace(const RunConfig& config, const CliOverrides& overrides,
              std::ostream& out, std::ostream& err);

}  // namespace gmhp

#endif
