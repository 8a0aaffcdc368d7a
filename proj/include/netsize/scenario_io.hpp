#pragma once

#include <string>
#include <string_view>

#include "netsize/scenario.hpp"

namespace netsize {

/// Parses the flat key = value scenario format. Keys:
///   agents          integer list, ".." ranges allowed (e.g. "1..35")
///   edges           identifier pairs "i-j", repeatable and additive
///   event           "t=<time> [add=i-j] [remove=i-j] ...", repeatable
///   gamma, horizon, sample_interval
///   init_mode       zeros | random (random needs init_seed, init_range)
///   rel_tol, abs_tol, max_step, affine_fast_path
/// '#' starts a comment. Unknown or duplicate scalar keys are errors.
/// Throws ParseError with file:line on malformed input, and validates the
/// result (validation messages are attributed to the file as a whole).
Scenario parse_scenario_text(std::string_view text, const std::string& name);

Scenario parse_scenario_file(const std::string& path);

} // namespace netsize
