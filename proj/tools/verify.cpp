#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "topokinetic/bernstein.hpp"
#include "topokinetic/csv.hpp"
#include "topokinetic/errors.hpp"
#include "topokinetic/random.hpp"
#include "topokinetic/rank.hpp"
#include "topokinetic/stats.hpp"

namespace topokinetic::cli {

namespace {

const Json& params(const Json& doc) {
  static const Json empty = Json::object();
  return doc.contains("verify") ? doc.at("verify") : empty;
}

template <typename T>
T param(const Json& doc, const char* key, T fallback) {
  const auto& p = params(doc);
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("verify parameter \"") + key + "\" has the wrong type");
  }
}

RankKernel suite_kernel(const Json& doc, const RankKernel& fallback) {
  return doc.contains("kernel") ? kernel_from_json(doc.at("kernel")) : fallback;
}

std::string format_ratio(double small, double large) {
  std::ostringstream s;
  s << small << " -> " << large;
  return s.str();
}

RealFunction named_function(const std::string& name, const RankKernel& kernel) {
  constexpr double pi = std::numbers::pi;
  if (name == "xsq") return {"xsq", [](double x) { return x * x; }, [](double) { return 2.0; }};
  if (name == "cubic") {
    return {"cubic", [](double x) { return x * x * x; }, [](double x) { return 6.0 * x; }};
  }
  if (name == "exp") {
    return {"exp", [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }};
  }
  if (name == "sin") {
    return {"sin", [=](double x) { return std::sin(pi * x); },
            [=](double x) { return -pi * pi * std::sin(pi * x); }};
  }
  if (name == "kernel") {
    if (!kernel.smooth()) throw ConfigError("bernstein check needs a C2 kernel");
    return as_function(kernel);
  }
  throw ConfigError("unknown function " + name + " (xsq, cubic, exp, sin, kernel)");
}

// Consecutive sizes form the decay ladder.
bool ladder_passes(const std::vector<ExpansionReport>& rows, std::string& detail) {
  bool ok = true;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    const auto v = residual_ladder(rows[k], rows[k + 1]);
    ok = ok && v.decays;
    detail = format_ratio(v.scaled_small, v.scaled_large);
  }
  return ok;
}

VerifyOutcome verify_bernstein(const Json& doc, std::ostream& csv) {
  const auto kernel = suite_kernel(doc, RankKernel::smooth_cutoff(0.5, 0.2));
  const auto name = param<std::string>(doc, "f", "xsq");
  const auto f = named_function(name, kernel);
  const bool exact = name == "xsq";
  const auto points = param(doc, "x", std::vector<double>{0.1, 0.3, 0.5, 0.7, 0.9});
  const auto sizes = param(doc, "sizes", exact ? std::vector<std::size_t>{10, 100, 1000}
                                               : std::vector<std::size_t>{400, 1600});
  std::vector<ExpansionReport> all;
  bool passed = true;
  double worst = 0.0;
  std::string detail;
  for (double x : points) {
    std::vector<ExpansionReport> rows;
    for (auto n : sizes) rows.push_back(lorentz_expansion_check(f, x, n));
    if (exact) {
      for (const auto& r : rows) worst = std::max(worst, std::abs(r.residual_corrected));
    } else {
      passed = ladder_passes(rows, detail) && passed;
    }
    all.insert(all.end(), rows.begin(), rows.end());
  }
  if (exact) passed = worst <= 1e-12;
  write_expansion_reports(csv, all);
  std::ostringstream s;
  s << "bernstein " << f.name << ": ";
  if (exact) {
    s << "max |residual_corrected| = " << worst;
  } else {
    s << "n*residual ladder " << detail;
  }
  return {passed, s.str(), {}};
}

VerifyOutcome verify_lemma(const Json& doc, std::ostream& csv) {
  const auto kernel = suite_kernel(doc, RankKernel::smooth_cutoff(0.5, 0.2));
  if (!kernel.smooth()) throw ConfigError("lemma check needs a C2 kernel");
  const double p = param(doc, "p", 0.4);
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("lemma check needs p in (0,1)");
  const auto sizes = param(doc, "sizes", std::vector<std::size_t>{800, 3200});
  std::vector<ExpansionReport> inside;
  std::vector<ExpansionReport> outside;
  bool split_ok = true;
  const double dk = kernel.derivative(p);
  for (auto n : sizes) {
    inside.push_back(lemma_expansion_check(kernel, p, n, BallCase::InsideBall));
    outside.push_back(lemma_expansion_check(kernel, p, n, BallCase::OutsideBall));
    const double gap = outside.back().corrected - inside.back().corrected;
    split_ok = split_ok && std::abs(gap + dk / static_cast<double>(n)) <= 1e-12 * (1.0 + std::abs(dk));
  }
  std::string d_in;
  std::string d_out;
  const bool ok = ladder_passes(inside, d_in) && ladder_passes(outside, d_out) && split_ok;
  auto rows = inside;
  rows.insert(rows.end(), outside.begin(), outside.end());
  write_expansion_reports(csv, rows);
  return {ok, "lemma " + kernel.describe() + ": inside " + d_in + ", outside " + d_out +
                  (split_ok ? ", split -K'(p)/N ok" : ", split -K'(p)/N FAILED"),
          {}};
}

VerifyOutcome verify_sn(const Json& doc, std::ostream& csv) {
  const auto kernel = suite_kernel(doc, RankKernel::constant());
  const auto sizes = param(doc, "sizes", std::vector<std::size_t>{100, 400, 1600});
  std::vector<ExpansionReport> rows;
  for (auto n : sizes) rows.push_back(sn_expansion_check(kernel, n));
  std::string detail;
  const bool ok = ladder_passes(rows, detail);
  write_expansion_reports(csv, rows);
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, std::abs(r.residual_corrected));
  std::ostringstream s;
  s << "sn " << kernel.describe() << ": max residual " << worst << ", n*residual " << detail;
  return {ok, s.str(), {}};
}

VerifyOutcome verify_rank(const Json& doc, std::ostream& csv) {
  const auto n = param<std::size_t>(doc, "n", 50);
  const double p = param(doc, "p", 0.3);
  const auto trials = param<std::size_t>(doc, "trials", 100000);
  if (n < 3) throw ConfigError("rank check needs n >= 3");
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("rank check needs p in (0,1)");
  const auto seed = doc.value("seed", std::uint64_t{0});
  const auto counts = sample_rank_law(n, p, trials, seed);
  const auto law = rank_distribution_oracle(p, n);
  const auto result = chi_square_test(counts, law);
  CsvWriter w(csv, {"rank", "observed", "expected"});
  for (std::size_t k = 0; k < counts.size(); ++k) {
    w.row({std::uint64_t{k + 1}, counts[k], law[k] * static_cast<double>(trials)});
  }
  std::ostringstream s;
  s << "rank law N=" << n << " p=" << p << ": chi2=" << result.statistic << " dof=" << result.dof
    << " p-value=" << result.p_value;
  return {result.p_value > 1e-3, s.str(), {}};
}

// Nonnegative random density with some empty cells, total mass one.
KineticState random_density(std::size_t cells, std::uint64_t seed) {
  Engine eng = stream_engine(seed, cells);
  KineticState s;
  s.length = 1.0;
  s.cells = cells;
  s.velocities = {-1.0, 0.5, 1.0};
  s.f.resize(cells * s.velocities.size());
  for (std::size_t m = 0; m < cells; ++m) {
    const bool empty = uniform01(eng) < 0.2;
    for (std::size_t a = 0; a < s.classes(); ++a) s.at(m, a) = empty ? 0.0 : uniform01(eng);
  }
  s.at(0, 0) += 0.1;
  const double total = s.total_mass();
  for (double& v : s.f) v /= total;
  return s;
}

VerifyOutcome verify_changevar(const Json& doc, std::ostream& csv) {
  const auto kernel = suite_kernel(doc, RankKernel::smooth_cutoff(0.5, 0.2));
  const auto grids = param(doc, "cells", std::vector<std::size_t>{32, 256});
  const auto densities = param<std::size_t>(doc, "densities", 10);
  const auto seed = doc.value("seed", std::uint64_t{0});
  const std::vector<double> radii{0.0, 0.01, 0.05, 0.13, 0.25, 0.37, 0.49, 0.75};

  std::vector<std::pair<std::string, MassIntegrand>> integrands{
      {"one", unit_integrand()}, {"K", kernel_integrand(kernel)}};
  if (kernel.smooth()) integrands.emplace_back("dK", kernel_derivative_integrand(kernel));

  std::vector<ExpansionReport> rows;
  double worst = 0.0;
  for (auto cells : grids) {
    for (std::size_t d = 0; d < densities; ++d) {
      const auto state = random_density(cells, seed + d);
      const PartialMassTable table(state, kernel);
      for (const auto& [label, h] : integrands) {
        for (double r : radii) {
          ExpansionReport row{"changevar_" + label, kernel.describe(), r, cells, 0, 0, 0, 0, 0};
          for (std::size_t m = 0; m < cells; ++m) {
            const auto c = change_of_variable_check(table, h, m, r);
            const double err = std::abs(c.lhs - c.rhs);
            if (m == 0 || err > row.residual_corrected) {
              row.lhs = c.lhs;
              row.leading = row.corrected = c.rhs;
              row.residual_leading = row.residual_corrected = err;
            }
          }
          worst = std::max(worst, row.residual_corrected);
          rows.push_back(row);
        }
      }
    }
  }
  write_expansion_reports(csv, rows);
  std::ostringstream s;
  s << "change of variable " << kernel.describe() << ": max |lhs - rhs| = " << worst;
  return {worst <= 1e-10, s.str(), {}};
}

}  // namespace

std::string verify_file_name(const Json& doc) {
  return "verify_" + param<std::string>(doc, "suite", "") + ".csv";
}

VerifyOutcome run_verify(const Json& doc, std::ostream& csv) {
  const auto suite = param<std::string>(doc, "suite", "");
  VerifyOutcome out;
  try {
    if (suite == "bernstein") {
      out = verify_bernstein(doc, csv);
    } else if (suite == "lemma") {
      out = verify_lemma(doc, csv);
    } else if (suite == "sn") {
      out = verify_sn(doc, csv);
    } else if (suite == "rank") {
      out = verify_rank(doc, csv);
    } else if (suite == "changevar") {
      out = verify_changevar(doc, csv);
    } else {
      throw ConfigError("unknown verify suite '" + suite + "' (bernstein, rank, lemma, sn, changevar)");
    }
  } catch (const NonSmoothKernel& e) {
    throw ConfigError(e.what());
  }
  out.file = verify_file_name(doc);
  return out;
}

}  // namespace topokinetic::cli
