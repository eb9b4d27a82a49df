#pragma once

#include <ostream>

#include "macrobell_cli/config.hpp"

namespace macrobell::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitFailed = 2;

// Each command writes its report to `out`, diagnostics to `err`, and returns
// the process exit code.

int cmd_rates(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_oracle(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_plan(const RunConfig& config, std::ostream& out, std::ostream& err);
/// `bins_out`, when non-null, receives the binned counts as CSV regardless of format.
int cmd_montecarlo(const RunConfig& config, std::ostream& out, std::ostream& err,
                   std::ostream* bins_out = nullptr);

}  // namespace macrobell::cli
