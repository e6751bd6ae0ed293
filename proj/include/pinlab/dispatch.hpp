#pragma once

#include <iosfwd>

#include "pinlab/config.hpp"

namespace pinlab {

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int failure = 1;  // certification failed or overflow dominated
inline constexpr int config = 2;
}  // namespace exit_code

// Runs the subcommand, writes results and manifest.txt into output_dir and
// a short summary to log.
int dispatch(const RunConfig& cfg, std::ostream& log);

}  // namespace pinlab
