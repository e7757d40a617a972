#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ranges>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "topokinetic/compare.hpp"
#include "topokinetic/csv.hpp"
#include "topokinetic/errors.hpp"
#include "topokinetic/kinetic.hpp"
#include "topokinetic/particles.hpp"
#include "verify.hpp"

#ifndef TOPOKINETIC_VERSION
#define TOPOKINETIC_VERSION "0.0.0"
#endif

namespace topokinetic::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::vector<std::string> sets;
  // named overrides; each maps to one dotted config path
  std::vector<std::pair<std::string, Json>> named;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

unsigned thread_count(const Json& doc, std::optional<unsigned> flag) {
  if (flag) return *flag;
  return doc.value("threads", 0u);
}

using Outputs = std::vector<std::string>;

int simulate(const Json& doc, const fs::path& dir, std::ostream& out, Outputs& files) {
  auto config = sim_config_from_json(doc);
  config.seed = doc.at("seed").get<std::uint64_t>();
  const auto result = run(config);
  if (config.record_snapshots) {
    auto f = open_output(dir / "trajectory.csv");
    write_trajectory(f, result);
    files.push_back("trajectory.csv");
  }
  auto f = open_output(dir / "diagnostics.csv");
  write_diagnostics(f, result.diagnostics);
  files.push_back("diagnostics.csv");
  const auto& d = result.diagnostics;
  out << "simulated N=" << config.n << " to t=" << d.times.back() << "; distinct velocities "
      << d.distinct_velocities.front() << " -> " << d.distinct_velocities.back();
  if (d.consensus_time) out << "; consensus at t=" << *d.consensus_time;
  out << '\n';
  return kOk;
}

int solve_kinetic(const Json& doc, const fs::path& dir, std::ostream& out, Outputs& files) {
  const auto options = solve_options_from_json(doc);
  const auto initial = kinetic_state_from_json(doc);
  const auto kernel = doc.contains("kernel") ? kernel_from_json(doc.at("kernel")) : RankKernel::constant();
  const auto sol = solve(initial, kernel, options);
  {
    auto f = open_output(dir / "density.csv");
    write_density(f, sol);
    files.push_back("density.csv");
  }
  {
    auto f = open_output(dir / "velocity.csv");
    write_velocity_marginal(f, sol);
    files.push_back("velocity.csv");
  }
  {
    auto f = open_output(dir / "mass.csv");
    CsvWriter w(f, {"t", "mass"});
    for (std::size_t k = 0; k < sol.times.size(); ++k) w.row({sol.times[k], sol.mass[k]});
    files.push_back("mass.csv");
  }
  if (options.keep_states) {
    auto f = open_output(dir / "phase_space.csv");
    write_phase_space(f, sol);
    files.push_back("phase_space.csv");
  }
  double drift = 0.0;
  for (double m : sol.mass) drift = std::max(drift, std::abs(m - sol.mass.front()));
  double change = 0.0;
  for (std::size_t m = 0; m < initial.cells; ++m) {
    change = std::max(change, std::abs(sol.density.back()[m] - sol.density.front()[m]));
  }
  out << "solved to t=" << sol.times.back() << " in " << sol.times.size() << " samples; max mass drift "
      << drift << "; max |rho(t_end) - rho(0)| " << change << '\n';
  return kOk;
}

int compare(const Json& doc, unsigned threads, const fs::path& dir, std::ostream& out, Outputs& files) {
  auto setup = compare_setup_from_json(doc);
  setup.seed = doc.at("seed").get<std::uint64_t>();
  setup.threads = threads;
  const auto report = run_comparison(setup);
  auto f = open_output(dir / "convergence.csv");
  write_convergence(f, report);
  files.push_back("convergence.csv");
  for (const auto& r : report.rows) {
    out << "N=" << r.n << " t=" << r.t << " d_rho=" << r.d_rho << "+-" << r.d_rho_stderr
        << " d_vel=" << r.d_vel << "+-" << r.d_vel_stderr << " chaos=" << r.chaos_metric << '\n';
  }
  const auto verdict = assess(report);
  out << "density " << (verdict.density ? "decreasing" : "NOT decreasing") << ", velocity "
      << (verdict.velocity ? "decreasing" : "NOT decreasing") << ", chaos "
      << (verdict.chaos ? "decreasing" : "NOT decreasing") << '\n';
  return verdict.passed() ? kOk : kCheckFailed;
}

int verify(const Json& doc, const fs::path& dir, std::ostream& out, Outputs& files) {
  const auto name = verify_file_name(doc);
  auto f = open_output(dir / name);
  const auto outcome = run_verify(doc, f);
  files.push_back(outcome.file);
  out << outcome.summary << (outcome.passed ? " [pass]" : " [FAIL]") << '\n';
  return outcome.passed ? kOk : kCheckFailed;
}

/// Runs a command from its fully resolved config and writes the manifest.
int execute(const std::string& command, const Json& doc, unsigned threads, const fs::path& dir,
            std::ostream& out) {
  fs::create_directories(dir);
  const auto started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  Outputs files;
  int code = kOk;
  if (command == "simulate") {
    code = simulate(doc, dir, out, files);
  } else if (command == "solve") {
    code = solve_kinetic(doc, dir, out, files);
  } else if (command == "compare") {
    code = compare(doc, threads, dir, out, files);
  } else if (command == "verify") {
    code = verify(doc, dir, out, files);
  } else {
    throw ConfigError("unknown command " + command);
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
  Json manifest{{"artifact", "topokinetic"},
                {"version", TOPOKINETIC_VERSION},
                {"command", command},
                {"seed", doc.at("seed")},
                {"threads", threads},
                {"config", doc},
                {"outputs", files},
                {"started_utc", started},
                {"wall_clock_seconds", elapsed.count()}};
  auto f = open_output(dir / "manifest.json");
  f << manifest.dump(2) << '\n';
  return code;
}

Json build_document(const std::string& command, const Options& opt) {
  Json doc = Json::object();
  if (!opt.config.empty()) {
    doc = load_config(opt.config);
  } else if (command != "verify") {
    throw ConfigError(command + " needs --config");
  }
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  for (const auto& s : opt.sets) apply_override(doc, s);
  for (const auto& [path, value] : opt.named) {
    Json* node = &doc;
    std::size_t start = 0;
    while (true) {
      const auto dot = path.find('.', start);
      node = &(*node)[path.substr(start, dot - start)];
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    *node = value;
  }
  doc["seed"] = resolve_seed(doc, opt.seed);
  return doc;
}

void add_common(CLI::App* app, Options& opt, bool config_required) {
  auto* c = app->add_option("--config,-c", opt.config, "JSON config file");
  if (config_required) c->required();
  app->add_option("--out,-o", opt.out_dir, "output directory")->capture_default_str();
  app->add_option("--seed", opt.seed, "master seed (overrides the config and TOPOKINETIC_SEED)");
  app->add_option("--threads", opt.threads, "worker thread cap (0: all cores)");
  app->add_option("--set", opt.sets, "override a config value, e.g. --set kinetic.dt=0.01");
}

// Registers `--flag` whose value is written to `path` when given.
template <typename T>
void add_named(CLI::App* app, Options& opt, const std::string& flag, const std::string& path,
               const std::string& help) {
  auto* o = app->add_option_function<T>(
      flag, [&opt, path](const T& v) { opt.named.emplace_back(path, Json(v)); }, help);
  if constexpr (!std::is_same_v<T, std::string> && std::ranges::range<T>) o->delimiter(',');
}

void add_switch(CLI::App* app, Options& opt, const std::string& flag, const std::string& path,
                const std::string& help) {
  app->add_flag_function(flag, [&opt, path](std::int64_t) { opt.named.emplace_back(path, Json(true)); },
                         help);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank-based leader-follower particle dynamics and their kinetic limit"};
  app.name("topokinetic");
  app.require_subcommand(1);
  Options opt;

  auto* sim = app.add_subcommand("simulate", "event-driven particle simulation");
  add_common(sim, opt, true);
  add_named<std::size_t>(sim, opt, "--n", "simulate.n", "number of particles");
  add_named<double>(sim, opt, "--t-end", "simulate.t_end", "final time");
  add_switch(sim, opt, "--stop-at-consensus", "simulate.stop_at_consensus", "stop once all velocities agree");

  auto* sol = app.add_subcommand("solve", "kinetic solver on the periodic line");
  add_common(sol, opt, true);
  add_named<double>(sol, opt, "--dt", "kinetic.dt", "time step");
  add_named<double>(sol, opt, "--t-end", "kinetic.t_end", "final time");

  auto* cmp = app.add_subcommand("compare", "particle ensembles against the kinetic solution");
  add_common(cmp, opt, true);
  add_named<std::size_t>(cmp, opt, "--runs", "compare.runs", "runs per N");
  add_named<std::vector<std::size_t>>(cmp, opt, "--ladder", "compare.ladder", "particle counts");
  add_named<double>(cmp, opt, "--dt", "kinetic.dt", "kinetic time step");

  auto* ver = app.add_subcommand("verify", "analytic identity and asymptotic checks");
  add_common(ver, opt, false);
  std::string suite;
  ver->add_option("suite", suite, "bernstein | rank | lemma | sn | changevar")->required();
  add_named<std::string>(ver, opt, "--kernel", "kernel.family", "kernel family");
  add_named<double>(ver, opt, "--theta", "kernel.theta", "cutoff position");
  add_named<double>(ver, opt, "--eps", "kernel.eps", "smooth cutoff half-width");
  add_named<double>(ver, opt, "--alpha", "kernel.alpha", "power-law exponent");
  add_switch(ver, opt, "--mirror", "kernel.mirror", "mirrored power law");
  add_named<std::string>(ver, opt, "--f", "verify.f", "bernstein test function");
  add_named<double>(ver, opt, "--p", "verify.p", "ball mass");
  add_named<std::vector<double>>(ver, opt, "--x", "verify.x", "evaluation points");
  add_named<std::vector<std::size_t>>(ver, opt, "--sizes", "verify.sizes", "size ladder");
  add_named<std::size_t>(ver, opt, "--n", "verify.n", "particles for the rank check");
  add_named<std::size_t>(ver, opt, "--trials", "verify.trials", "rank samples");
  add_named<std::vector<std::size_t>>(ver, opt, "--cells", "verify.cells", "grid sizes");
  add_named<std::size_t>(ver, opt, "--densities", "verify.densities", "random densities per grid");

  auto* rep = app.add_subcommand("replay", "rerun a command from its manifest");
  std::string manifest_path;
  rep->add_option("manifest", manifest_path, "manifest.json")->required();
  rep->add_option("--out,-o", opt.out_dir, "output directory")->capture_default_str();
  rep->add_option("--threads", opt.threads, "worker thread cap");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (rep->parsed()) {
      const Json manifest = load_config(manifest_path);
      if (!manifest.contains("command") || !manifest.contains("config")) {
        throw ConfigError(manifest_path + " is not a run manifest");
      }
      const Json& doc = manifest.at("config");
      return execute(manifest.at("command").get<std::string>(), doc,
                     thread_count(doc, opt.threads), opt.out_dir, out);
    }
    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "verify") opt.named.emplace_back("verify.suite", suite);
    const Json doc = build_document(command, opt);
    return execute(command, doc, thread_count(doc, opt.threads), opt.out_dir, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const StepTooLarge& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const GridMismatch& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const DegenerateKernel& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const EmptyDensity& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kUsageError;
}

}  // namespace topokinetic::cli
