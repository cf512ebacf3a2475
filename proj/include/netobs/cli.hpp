#ifndef NETOBS_CLI_HPP
#define NETOBS_CLI_HPP

#include <string>
#include <vector>

namespace netobs::cli {

/// Entry point behind the netobs binary. Subcommands: simulate, observe,
/// analyze, place-sensors, scenario. Returns 0 on success, 2 on input or
/// validation errors, 3 on solver divergence.
int run(const std::vector<std::string>& args);

} // namespace netobs::cli

#endif
