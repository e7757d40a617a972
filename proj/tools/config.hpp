#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "topokinetic/compare.hpp"
#include "topokinetic/kernel.hpp"
#include "topokinetic/kinetic.hpp"
#include "topokinetic/particles.hpp"

namespace topokinetic::cli {

using Json = nlohmann::ordered_json;

/// Reads a JSON config file. Throws ConfigError if it is missing or malformed.
Json load_config(const std::string& path);

/// Applies `path=value` (dotted path, value parsed as JSON or kept as a string).
void apply_override(Json& doc, const std::string& assignment);

/// Seed precedence: flag, then the config's "seed", then TOPOKINETIC_SEED, then 0.
std::uint64_t resolve_seed(const Json& doc, std::optional<std::uint64_t> flag);

RankKernel kernel_from_json(const Json& j);
Json kernel_to_json(const RankKernel& kernel);

/// "kinetic" section: grid, velocity set and initial density.
KineticState kinetic_state_from_json(const Json& doc);
SolveOptions solve_options_from_json(const Json& doc);

/// "simulate" section plus the top-level kernel and seed.
SimConfig sim_config_from_json(const Json& doc);

/// "compare" section plus the kinetic section it starts from.
CompareSetup compare_setup_from_json(const Json& doc);

}  // namespace topokinetic::cli
