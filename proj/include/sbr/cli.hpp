#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sbr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitIo = 3;

// Entry point of the `sbr` tool. `args` excludes the program name.
// Subcommands: ingest, stats, evaluate, sweep, heatmap, delays, synth.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbr
