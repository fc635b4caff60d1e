#include "commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>

#include "parallel.hpp"

namespace rectprod::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream index reserved for oracle diagnostics so they never overlap trials.
constexpr std::uint64_t kDiagnosticStreamBase = 1ull << 62;

std::uint64_t seed_of(const Json& cfg) { return cfg.at("seed").get<std::uint64_t>(); }
int trials_of(const Json& cfg) { return cfg.at("trials").get<int>(); }
int jobs_of(const Json& cfg) { return cfg.at("jobs").get<int>(); }

std::string trial_file_name(std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trial_%04zu.csv", t);
  return buf;
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void write_csv(const std::filesystem::path& path, const CsvTable& t) { write_text(path, to_csv_string(t)); }

const Json& require_chain(const Json& cfg) {
  if (!cfg.contains("chain")) throw Error(ErrorCode::BadParameter, "config needs a 'chain' entry");
  return cfg.at("chain");
}

Json gof_json_or_null(const std::optional<GofReport>& r) { return r ? to_json(*r) : Json(nullptr); }

struct TrialOutput {
  SpectralSample spectrum;
  PlanarSample planar;
  std::optional<InvariantReport> invariants;
};

CommandResult simulate_one(const Json& cfg, std::ostream& log) {
  const ChainSpec spec = resolve_chain(require_chain(cfg));
  const auto law = resolve_law(cfg);
  const RingBand ring = resolve_ring(cfg, law);
  const bool check = cfg.value("check_invariants", false);
  const auto trials = static_cast<std::size_t>(trials_of(cfg));
  const Rng base(seed_of(cfg));
  const auto dir = run_directory(cfg);

  log << "simulate: n=" << spec.n << " m=" << spec.m << " gamma=" << spec.gamma << " trials=" << trials
      << " -> " << dir.string() << "\n";

  std::vector<TrialOutput> results(trials);
  parallel_for(trials, jobs_of(cfg), [&](std::size_t t) {
    const ScaledProduct p = product_chain(spec, base.split(t));
    TrialOutput& r = results[t];
    r.spectrum = eigenvalues(p);
    r.planar = planar_sample(r.spectrum, spec);
    if (check) r.invariants = spectral_invariant_check(p, r.spectrum);
    write_csv(dir / "trials" / trial_file_name(t), to_csv(r.planar, SampleSource::Eigen));
  });

  CsvTable scatter{{"trial", "radius", "angle", "source"}, {}};
  CsvTable spectrum{{"trial", "index", "log_modulus", "angle"}, {}};
  PlanarSample pooled;
  Json per_trial = Json::array();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& r = results[t];
    for (const auto& pt : r.planar.points) {
      scatter.rows.push_back({std::to_string(t), format_double(pt.radius), format_double(pt.angle), "eigen"});
      pooled.points.push_back(pt);
    }
    for (std::size_t j = 0; j < r.spectrum.size(); ++j) {
      spectrum.rows.push_back({std::to_string(t), std::to_string(j), format_double(r.spectrum.log_modulus[j]),
                               format_double(r.spectrum.angle[j])});
    }
    Json entry = {{"trial", t}};
    if (law) {
      GofReport g = gof_against_law(r.planar, *law, ring);
      g.n = spec.n;
      g.m = spec.m;
      g.seed = seed_of(cfg);
      entry["gof"] = to_json(g);
    } else {
      entry["ring_coverage"] = ring_coverage(r.planar, ring.inner, ring.outer, ring.slack);
    }
    if (r.invariants) entry["invariants"] = to_json(*r.invariants);
    per_trial.push_back(entry);
  }
  write_csv(dir / "scatter.csv", scatter);
  write_csv(dir / "spectrum.csv", spectrum);

  std::optional<GofReport> pooled_gof;
  if (law) {
    pooled_gof = gof_against_law(pooled, *law, ring);
    pooled_gof->n = spec.n;
    pooled_gof->m = spec.m;
    pooled_gof->seed = seed_of(cfg);
  }
  Json report = {{"command", "simulate"},
                 {"chain", to_json(spec)},
                 {"law", law ? to_json(*law) : Json(nullptr)},
                 {"ring", {{"inner", ring.inner}, {"outer", ring.outer}, {"slack", ring.slack}}},
                 {"ring_coverage", ring_coverage(pooled, ring.inner, ring.outer, ring.slack)},
                 {"gof", gof_json_or_null(pooled_gof)},
                 {"trials", per_trial}};
  write_json(dir / "report.json", report);
  write_json(dir / "config.json", cfg);

  CommandResult result;
  result.run_dirs.push_back(dir);
  result.summary = report;
  return result;
}

}  // namespace

CommandResult cmd_simulate(const Json& cfg, std::ostream& out, std::ostream& log) {
  const Json& chain = require_chain(cfg);
  const bool sweep = chain.contains("params") && chain["params"].contains("m") && chain["params"]["m"].is_array();
  CommandResult result;
  if (!sweep) {
    result = simulate_one(cfg, log);
  } else {
    // One sub-run per m under the parent run directory.
    const auto parent = run_directory(cfg);
    Json index = Json::array();
    for (const auto& m : chain["params"]["m"]) {
      if (!m.is_number_integer()) throw Error(ErrorCode::BadParameter, "m list entries must be integers");
      Json sub = cfg;
      sub["chain"]["params"]["m"] = m;
      sub["out"] = parent.string();
      sub["run_id"] = "m" + std::to_string(m.get<std::int64_t>());
      CommandResult one = simulate_one(sub, log);
      result.run_dirs.push_back(one.run_dirs.front());
      index.push_back({{"m", m}, {"dir", sub["run_id"]}, {"ring_coverage", one.summary["ring_coverage"]},
                       {"gof", one.summary["gof"]}});
    }
    write_json(parent / "config.json", cfg);
    write_json(parent / "report.json", {{"command", "simulate"}, {"sweep", index}});
    result.summary = {{"sweep", index}};
  }
  for (const auto& d : result.run_dirs) out << d.string() << "\n";
  return result;
}

CommandResult cmd_oracle(const Json& cfg, std::ostream& out, std::ostream& log) {
  const ChainSpec spec = resolve_chain(require_chain(cfg));
  const auto law = resolve_law(cfg);
  const auto trials = static_cast<std::size_t>(trials_of(cfg));
  const Rng base(seed_of(cfg));
  const auto dir = run_directory(cfg);
  log << "oracle: n=" << spec.n << " m=" << spec.m << " trials=" << trials << " -> " << dir.string() << "\n";

  std::vector<OracleSample> samples(trials);
  parallel_for(trials, jobs_of(cfg), [&](std::size_t t) { samples[t] = sample_oracle(spec, base.split(t)); });

  CsvTable radii{{"trial", "index", "log_t", "radius", "source"}, {}};
  RadialSample pooled;
  pooled.source = SampleSource::Oracle;
  for (std::size_t t = 0; t < trials; ++t) {
    const RadialSample r = oracle_radii(samples[t], spec);
    for (std::size_t j = 0; j < r.radii.size(); ++j) {
      radii.rows.push_back({std::to_string(t), std::to_string(j + 1), format_double(samples[t].log_t[j]),
                            format_double(r.radii[j]), "oracle"});
      pooled.radii.push_back(r.radii[j]);
    }
  }
  write_csv(dir / "radii.csv", radii);

  // Per-index Monte Carlo mean of ln T_j against sum_r psi(l_r + j).
  CsvTable digamma{{"j", "mean_log_t", "expected_log_t", "std_error", "z"}, {}};
  Json max_abs_z = nullptr;
  for (std::int64_t j = 1; j <= spec.n; ++j) {
    double sum = 0.0;
    for (const auto& s : samples) sum += s.log_t[static_cast<std::size_t>(j - 1)];
    const double mean = sum / static_cast<double>(trials);
    double se = kNaN;
    if (trials > 1) {
      double ss = 0.0;
      for (const auto& s : samples) {
        const double d = s.log_t[static_cast<std::size_t>(j - 1)] - mean;
        ss += d * d;
      }
      se = std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials));
    }
    const double expected = expected_log_t(spec, j);
    const double z = (se > 0.0) ? (mean - expected) / se : kNaN;
    if (std::isfinite(z) && (max_abs_z.is_null() || std::abs(z) > max_abs_z.get<double>())) max_abs_z = std::abs(z);
    digamma.rows.push_back(
        {std::to_string(j), format_double(mean), format_double(expected), format_double(se), format_double(z)});
  }
  write_csv(dir / "digamma.csv", digamma);

  CsvTable diagnostics{{"x", "j", "mean", "stddev", "replicates"}, {}};
  Json diag_json = Json::array();
  const auto& grid = cfg.at("x_grid");
  const int replicates = cfg.at("replicates").get<int>();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i].get<double>();
    TnLimitSummary s{x, 0, kNaN, kNaN, replicates};
    // Grid points with floor(n x) = 0 have no T_j; the row stays with NaN statistics.
    if (!(x > 0.0 && x <= 1.0) || std::floor(static_cast<double>(spec.n) * x) >= 1.0) {
      s = tnlimit_diagnostic(spec, x, replicates, base.split(kDiagnosticStreamBase + i));
    }
    diagnostics.rows.push_back({format_double(s.x), std::to_string(s.j), format_double(s.mean),
                                format_double(s.stddev), std::to_string(s.replicates)});
    diag_json.push_back(to_json(s));
  }
  write_csv(dir / "diagnostics.csv", diagnostics);

  Json report = {{"command", "oracle"},
                 {"chain", to_json(spec)},
                 {"trials", trials},
                 {"digamma_max_abs_z", max_abs_z},
                 {"diagnostics", diag_json}};
  if (law) {
    report["law"] = to_json(*law);
    report["ks_radial"] = ks_one_sample(pooled, radial_cdf(*law));
    report["wasserstein_radial"] = wasserstein1(pooled, radial_quantile(*law));
  }
  write_json(dir / "report.json", report);
  write_json(dir / "config.json", cfg);
  out << dir.string() << "\n";

  CommandResult result;
  result.run_dirs.push_back(dir);
  result.summary = report;
  return result;
}

CommandResult cmd_limit(const Json& cfg, std::ostream& out, std::ostream& log) {
  if (!cfg.contains("law") || cfg["law"].empty()) {
    throw Error(ErrorCode::BadParameter, "limit needs a law (--preset NAME or a 'law' config entry)");
  }
  const LimitLaw law = law_from_json(cfg["law"]);
  const int points = cfg.at("grid_points").get<int>();
  if (points < 2) throw Error(ErrorCode::BadParameter, "grid_points must be >= 2");
  const auto dir = run_directory(cfg);
  log << "limit: type " << to_string(law.type()) << " -> " << dir.string() << "\n";

  const bool type1 = law.type() == LawType::TypeI;
  CsvTable table;
  table.header = type1 ? std::vector<std::string>{"x", "F", "F_star", "f", "f_star", "planar_density"}
                       : std::vector<std::string>{"x", "F_star"};
  const double f0 = type1 ? law.f_zero() : kNaN;
  for (int i = 0; i < points; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(points - 1);
    if (!type1) {
      table.rows.push_back({format_double(x), format_double(f_star_eval(law, x))});
      continue;
    }
    const double fd = x > 0.0 ? f_density(law, x) : kNaN;
    const double fsd = (x > f0 && x < 1.0) ? f_star_density(law, x) : kNaN;
    table.rows.push_back({format_double(x), format_double(f_eval(law, x)), format_double(f_star_eval(law, x)),
                          format_double(fd), format_double(fsd), format_double(planar_density(law, x))});
  }
  write_csv(dir / "limit.csv", table);
  Json summary = {{"type", std::string(to_string(law.type()))},
                  {"f_zero", type1 ? Json(f0) : Json(nullptr)},
                  {"grid_points", points},
                  {"law", to_json(law)}};
  write_json(dir / "limit.json", summary);
  write_json(dir / "config.json", cfg);
  out << dir.string() << "\n";

  CommandResult result;
  result.run_dirs.push_back(dir);
  result.summary = summary;
  return result;
}

CommandResult cmd_classify(const Json& cfg, std::ostream& out, std::ostream& log) {
  const std::string family_name = cfg.value("family", std::string("square"));
  const Json params = cfg.value("params", Json::object());
  const std::string m_rule_name = params.value("m_rule", std::string("n"));
  const MRule m_rule = parse_m_rule(m_rule_name);

  DimensionFamily family;
  std::string default_gamma;
  if (family_name == "square") {
    family = square_family(m_rule, m_rule_name);
    default_gamma = "m";
  } else if (family_name == "example2") {
    const double alpha = params.contains("alpha") ? params["alpha"].get<double>() : 2.0;
    family = example2_family(alpha, m_rule, m_rule_name);
    default_gamma = "2m";
  } else {
    throw Error(ErrorCode::UnknownFamily, "no dimension family named '" + family_name + "'");
  }
  const std::string gamma_name = cfg.value("gamma_rule", default_gamma);
  const auto probes = cfg.at("probes").get<std::vector<std::int64_t>>();
  log << "classify: family " << family_name << ", gamma rule " << gamma_name << "\n";

  const TypeDiagnostics diag = classify(family, parse_gamma_rule(gamma_name), probes);
  Json report = to_json(diag);
  report["family"] = family_name;
  report["family_description"] = family.description;
  report["gamma_rule"] = gamma_name;
  const auto dir = run_directory(cfg);
  write_json(dir / "report.json", report);
  write_json(dir / "config.json", cfg);
  out << report.dump(2) << "\n";

  CommandResult result;
  result.run_dirs.push_back(dir);
  result.summary = report;
  return result;
}

CommandResult cmd_gof(const Json& cfg, std::ostream& out, std::ostream& log) {
  if (!cfg.contains("sample")) throw Error(ErrorCode::BadParameter, "gof needs 'sample' (planar CSV path)");
  const PlanarSample sample = planar_from_csv(parse_csv(read_text(cfg["sample"].get<std::string>())));
  if (sample.points.empty()) throw Error(ErrorCode::EmptySample, "gof sample is empty");
  const RadialSample radial = radial_part(sample);
  const auto dir = run_directory(cfg);
  log << "gof: " << sample.points.size() << " points -> " << dir.string() << "\n";

  Json report = {{"command", "gof"}, {"points", sample.points.size()}, {"angle_ks", angle_uniformity(sample)}};
  if (cfg.contains("against")) {
    const PlanarSample other = planar_from_csv(parse_csv(read_text(cfg["against"].get<std::string>())));
    const RadialSample other_radial = radial_part(other);
    report["against_points"] = other.points.size();
    report["ks_two_sample"] = ks_two_sample(radial, other_radial);
    report["wasserstein_radial"] = wasserstein1(radial, other_radial);
  } else {
    const auto law = resolve_law(cfg);
    if (!law) throw Error(ErrorCode::BadParameter, "gof needs 'against' (CSV path) or a law");
    const RingBand ring = resolve_ring(cfg, law);
    report["law"] = to_json(*law);
    report["ring"] = {{"inner", ring.inner}, {"outer", ring.outer}, {"slack", ring.slack}};
    report["gof"] = to_json(gof_against_law(sample, *law, ring));
  }
  write_json(dir / "report.json", report);
  write_json(dir / "config.json", cfg);
  out << report.dump(2) << "\n";

  CommandResult result;
  result.run_dirs.push_back(dir);
  result.summary = report;
  return result;
}

CommandResult run_command(const std::string& command, const Json& cfg, std::ostream& out, std::ostream& log) {
  if (command == "simulate") return cmd_simulate(cfg, out, log);
  if (command == "oracle") return cmd_oracle(cfg, out, log);
  if (command == "limit") return cmd_limit(cfg, out, log);
  if (command == "classify") return cmd_classify(cfg, out, log);
  if (command == "gof") return cmd_gof(cfg, out, log);
  throw Error(ErrorCode::BadParameter, "unknown command '" + command + "'");
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectra of products of rectangular Ginibre matrices"};
  app.require_subcommand(1);

  struct Raw {
    std::string config, out, preset;
    std::uint64_t seed = 0;
    int trials = 0, jobs = 0;
    std::vector<std::string> params;
  };
  std::map<std::string, Raw> raw;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "Sample product spectra and compare them with a limit law"},
      {"oracle", "Sample the Gamma-product oracle and digamma diagnostics"},
      {"limit", "Tabulate a limit law on a grid"},
      {"classify", "Guess the limit type of a dimension family"},
      {"gof", "Goodness of fit for a planar sample CSV"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    Raw& r = raw[name];
    sub->add_option("--config", r.config, "JSON config file");
    sub->add_option("--seed", r.seed, "64-bit seed");
    sub->add_option("--trials", r.trials, "Number of trials")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", r.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", r.out, "Output directory (RECTPROD_OUT overrides)");
    sub->add_option("--preset", r.preset, "Preset law or chain family");
    sub->add_option("--param", r.params, "key=value override, repeatable");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  for (const auto& [name, help] : commands) {
    auto* sub = app.get_subcommand(name);
    if (!sub->parsed()) continue;
    const Raw& r = raw[name];
    FlagOverrides flags;
    if (sub->count("--config")) flags.config_path = r.config;
    if (sub->count("--seed")) flags.seed = r.seed;
    if (sub->count("--trials")) flags.trials = r.trials;
    if (sub->count("--jobs")) flags.jobs = r.jobs;
    if (sub->count("--out")) flags.out = r.out;
    if (sub->count("--preset")) flags.preset = r.preset;
    flags.params = r.params;
    try {
      const Json cfg = resolve_config(name, flags, std::getenv("RECTPROD_OUT"));
      return run_command(name, cfg, out, err).exit_code;
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    } catch (const nlohmann::json::exception& e) {
      err << "error: ParseError: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}

}  // namespace rectprod::cli
