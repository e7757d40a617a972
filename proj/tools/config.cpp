#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include "topokinetic/errors.hpp"

namespace topokinetic::cli {

namespace {

std::string normalized(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '_' || c == '-' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

const Json& section(const Json& doc, const char* name) {
  if (!doc.contains(name) || !doc[name].is_object()) {
    throw ConfigError(std::string("config needs a \"") + name + "\" object");
  }
  return doc[name];
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config field \"") + key + "\" has the wrong type");
  }
}

template <typename T>
T require(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("config field \"") + key + "\" is required");
  return get_or<T>(j, key, T{});
}

// A list, or a scalar repeated `count` times.
std::vector<double> list_or_scalar(const Json& j, const char* key, std::size_t count) {
  if (!j.contains(key)) return {};
  const auto& v = j.at(key);
  if (v.is_number()) return std::vector<double>(count, v.get<double>());
  return get_or<std::vector<double>>(j, key, {});
}

std::vector<double> velocity_set(const Json& kin) {
  if (!kin.contains("velocities")) throw ConfigError("kinetic.velocities is required");
  const auto& v = kin.at("velocities");
  if (v.is_array()) return get_or<std::vector<double>>(kin, "velocities", {});
  // lattice form: {"count": n, "min": v0, "step": h}
  const auto count = require<std::size_t>(v, "count");
  const auto lo = require<double>(v, "min");
  const auto step = require<double>(v, "step");
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = lo + static_cast<double>(k) * step;
  return out;
}

}  // namespace

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like path=value: " + assignment);
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    value = text;
  }
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw ConfigError("empty key in override " + path);
    if (!node->is_object()) *node = Json::object();
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

std::uint64_t resolve_seed(const Json& doc, std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (doc.contains("seed")) return get_or<std::uint64_t>(doc, "seed", 0);
  if (const char* env = std::getenv("TOPOKINETIC_SEED"); env && *env) {
    char* end = nullptr;
    const auto value = std::strtoull(env, &end, 10);
    if (*end != '\0') throw ConfigError("TOPOKINETIC_SEED must be an unsigned integer");
    return value;
  }
  return 0;
}

RankKernel kernel_from_json(const Json& j) {
  if (j.is_string()) return kernel_from_json(Json{{"family", j}});
  if (!j.is_object()) throw ConfigError("kernel must be an object or a family name");
  const auto family = normalized(require<std::string>(j, "family"));
  try {
    if (family == "constant") return RankKernel::constant();
    if (family == "uniformcutoff") return RankKernel::uniform_cutoff(get_or(j, "theta", 0.5));
    if (family == "smoothcutoff") {
      return RankKernel::smooth_cutoff(get_or(j, "theta", 0.5), get_or(j, "eps", 0.2));
    }
    if (family == "powerlaw") {
      return RankKernel::power_law(get_or(j, "alpha", 2.0), get_or(j, "mirror", false));
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid kernel: ") + e.what());
  }
  throw ConfigError("unknown kernel family " + j.at("family").get<std::string>());
}

Json kernel_to_json(const RankKernel& k) {
  switch (k.family()) {
    case KernelFamily::Constant: return {{"family", "constant"}};
    case KernelFamily::UniformCutoff: return {{"family", "uniformcutoff"}, {"theta", k.theta()}};
    case KernelFamily::SmoothCutoff:
      return {{"family", "smoothcutoff"}, {"theta", k.theta()}, {"eps", k.eps()}};
    case KernelFamily::PowerLaw:
      return {{"family", "powerlaw"}, {"alpha", k.alpha()}, {"mirror", k.mirrored()}};
  }
  return {};
}

KineticState kinetic_state_from_json(const Json& doc) {
  const auto& kin = section(doc, "kinetic");
  const double length = get_or(kin, "length", 1.0);
  const auto cells = require<std::size_t>(kin, "cells");
  auto velocities = velocity_set(kin);
  const auto nv = velocities.size();
  auto weights = list_or_scalar(kin, "weights", nv);
  const Json init = kin.contains("init") ? kin.at("init") : Json{{"type", "homogeneous"}};
  const auto type = normalized(get_or<std::string>(init, "type", "homogeneous"));
  try {
    if (type == "homogeneous") return homogeneous_state(length, cells, velocities, weights);
    if (type == "modulated") {
      return modulated_state(length, cells, velocities, weights,
                             list_or_scalar(init, "amplitudes", nv),
                             list_or_scalar(init, "phases", nv), get_or(init, "wavenumber", 1));
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid kinetic initial state: ") + e.what());
  }
  throw ConfigError("unknown kinetic init type " + type);
}

SolveOptions solve_options_from_json(const Json& doc) {
  const auto& kin = section(doc, "kinetic");
  SolveOptions o;
  o.dt = get_or(kin, "dt", o.dt);
  o.t_end = get_or(kin, "t_end", o.t_end);
  o.sample_interval = get_or(kin, "sample_interval", o.sample_interval);
  o.keep_states = get_or(kin, "keep_states", false);
  const auto splitting = normalized(get_or<std::string>(kin, "splitting", "lie"));
  if (splitting == "lie") {
    o.step.splitting = Splitting::Lie;
  } else if (splitting == "strang") {
    o.step.splitting = Splitting::Strang;
  } else {
    throw ConfigError("splitting must be lie or strang");
  }
  const auto scheme = normalized(get_or<std::string>(kin, "collision", "forwardeuler"));
  if (scheme == "forwardeuler" || scheme == "euler") {
    o.step.collision = CollisionScheme::ForwardEuler;
  } else if (scheme == "exponential") {
    o.step.collision = CollisionScheme::Exponential;
  } else {
    throw ConfigError("collision must be forward_euler or exponential");
  }
  o.step.collisions = get_or(kin, "collisions", true);
  if (o.dt > 1.0) throw StepTooLarge("kinetic step requires dt <= 1");
  if (!(o.dt > 0.0)) throw ConfigError("kinetic.dt must be positive");
  if (!(o.t_end >= 0.0)) throw ConfigError("kinetic.t_end must be >= 0");
  if (!(o.sample_interval > 0.0)) throw ConfigError("kinetic.sample_interval must be positive");
  return o;
}

SimConfig sim_config_from_json(const Json& doc) {
  const auto& sim = section(doc, "simulate");
  SimConfig c;
  c.n = require<std::size_t>(sim, "n");
  if (doc.contains("kernel")) c.kernel = kernel_from_json(doc.at("kernel"));
  c.t_end = get_or(sim, "t_end", c.t_end);
  c.sample_interval = get_or(sim, "sample_interval", c.sample_interval);
  c.record_snapshots = get_or(sim, "trajectory", true);
  c.stop_at_consensus = get_or(sim, "stop_at_consensus", false);
  const auto selection = normalized(get_or<std::string>(sim, "selection", "quickselect"));
  if (selection == "quickselect") {
    c.selection = SelectionStrategy::Quickselect;
  } else if (selection == "fullsort" || selection == "sort") {
    c.selection = SelectionStrategy::FullSort;
  } else {
    throw ConfigError("selection must be quickselect or full_sort");
  }

  const Json metric = sim.contains("metric") ? sim.at("metric") : Json{{"type", "euclidean"}};
  const auto kind = normalized(get_or<std::string>(metric, "type", "euclidean"));
  if (kind == "euclidean") {
    const int dim = get_or(metric, "dim", 1);
    if (dim != 1 && dim != 2) throw ConfigError("euclidean metric supports dim 1 or 2");
    c.metric = Metric::euclidean(dim);
  } else if (kind == "periodic" || kind == "periodicline") {
    const double length = get_or(metric, "length", 1.0);
    if (!(length > 0.0)) throw ConfigError("periodic length must be positive");
    c.metric = Metric::periodic_line(length);
  } else {
    throw ConfigError("unknown metric type " + kind);
  }

  const Json init = sim.contains("init") ? sim.at("init") : Json{{"type", "box"}};
  const auto type = normalized(get_or<std::string>(init, "type", "box"));
  if (type == "box") {
    UniformBox box;
    const auto x = get_or(init, "x", std::vector<double>{box.x_lo, box.x_hi});
    const auto v = get_or(init, "v", std::vector<double>{box.v_lo, box.v_hi});
    if (x.size() != 2 || v.size() != 2) throw ConfigError("box ranges need two values");
    box = UniformBox{x[0], x[1], v[0], v[1]};
    c.init = box;
  } else if (type == "kinetic") {
    const auto state = kinetic_state_from_json(doc);
    PhaseGrid grid{state.length, state.cells, state.velocities, {}};
    grid.mass.reserve(state.f.size());
    for (double f : state.f) grid.mass.push_back(f * state.dx());
    c.init = grid;
  } else {
    throw ConfigError("unknown particle init type " + type);
  }
  c.validate();
  return c;
}

CompareSetup compare_setup_from_json(const Json& doc) {
  const auto& cmp = section(doc, "compare");
  CompareSetup s;
  s.initial = kinetic_state_from_json(doc);
  if (doc.contains("kernel")) s.kernel = kernel_from_json(doc.at("kernel"));
  s.ladder = require<std::vector<std::size_t>>(cmp, "ladder");
  s.runs = get_or(cmp, "runs", s.runs);
  s.times = get_or(cmp, "times", s.times);
  s.comparison_cells = get_or(cmp, "comparison_cells", s.comparison_cells);
  s.chaos_cells = get_or(cmp, "chaos_cells", s.chaos_cells);
  s.chaos_classes = get_or(cmp, "chaos_classes", s.chaos_classes);
  s.resamples = get_or(cmp, "resamples", s.resamples);
  s.solve = solve_options_from_json(doc);
  s.validate();
  return s;
}

}  // namespace topokinetic::cli
