// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unistd.h>

#include "commands.hpp"
#include "rectprod/special.hpp"

#include <Eigen/QR>

using namespace rectprod;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path work_dir() {
  const fs::path p = fs::temp_directory_path() / ("rectprod_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

// 1 and 2 share one n = 400 sweep over m.
struct RingRun {
  double coverage_m50 = 0.0;
  double coverage_m3 = 0.0;
  double ks_eigen = 1.0;
  double seconds = 0.0;
  bool finite = false;
};

RingRun run_ring_sweep(const fs::path& out) {
  cli::FlagOverrides flags;
  flags.seed = 20240601;
  flags.out = out.string();
  flags.preset = "example2";
  flags.params = {"n=400", "m=3,50", "alpha=2", "check_invariants=true"};
  const Json cfg = cli::resolve_config("simulate", flags);
  std::ostringstream sink;
  const auto t0 = Clock::now();
  const cli::CommandResult r = cli::run_command("simulate", cfg, sink, sink);
  RingRun f;
  f.seconds = seconds_since(t0);
  for (const auto& entry : r.summary["sweep"]) {
    const double cov = entry["ring_coverage"].get<double>();
    if (entry["m"] == 3) f.coverage_m3 = cov;
    if (entry["m"] == 50) {
      f.coverage_m50 = cov;
      f.ks_eigen = entry["gof"]["ks_radial"].get<double>();
    }
  }
  const Json report50 = Json::parse(read_text(r.run_dirs.back() / "report.json"));
  const Json inv = report50["trials"][0]["invariants"];
  f.finite = std::isfinite(inv["logdet_lu"].get<double>()) && std::isfinite(report50["gof"]["ks_radial"].get<double>());
  return f;
}

Outcome criterion1(const RingRun& f) {
  Outcome o;
  o.require(f.coverage_m50 >= 0.95, "coverage(m=50)=" + fmt("%.4f", f.coverage_m50) + " >= 0.95");
  o.require(f.coverage_m3 < f.coverage_m50, "coverage(m=3)=" + fmt("%.4f", f.coverage_m3) + " < coverage(m=50)");
  o.require(f.seconds <= 300.0, "runtime " + fmt("%.1f", f.seconds) + "s <= 300s");
  o.require(f.finite, "product finite at n=400, m=50");
  return o;
}

Outcome criterion2(const RingRun& f) {
  Outcome o;
  o.require(f.ks_eigen <= 0.08, "KS(eigen, F*)=" + fmt("%.4f", f.ks_eigen) + " <= 0.08");
  const ChainSpec spec = rectangular_chain(400, 50, 800, 100.0);
  const LimitLaw law = preset("example2", {{"alpha", 2.0}});
  const RadialSample oracle = oracle_radii(sample_oracle(spec, Rng(20240601)), spec);
  const double ks = ks_one_sample(oracle, radial_cdf(law));
  o.require(ks <= 0.08, "KS(oracle, F*)=" + fmt("%.4f", ks) + " <= 0.08");
  return o;
}

Outcome criterion3() {
  Outcome o;
  const ChainSpec spec = square_chain(200, 5, 5.0);
  const auto t0 = Clock::now();
  int within = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Rng base(1000 + seed);
    const ScaledProduct p = product_chain(spec, base.split(0));
    const RadialSample eig = radial_part(planar_sample(eigenvalues(p), spec));
    const RadialSample orc = oracle_radii(sample_oracle(spec, base.split(1)), spec);
    const double ks = ks_two_sample(eig, orc);
    worst = std::max(worst, ks);
    if (ks <= 0.17) ++within;
  }
  const double secs = seconds_since(t0);
  o.require(within >= 9, std::to_string(within) + "/10 seeds with KS <= 0.17 (max " + fmt("%.4f", worst) + ")");
  o.require(secs <= 60.0, "runtime " + fmt("%.1f", secs) + "s <= 60s");
  return o;
}

Outcome criterion4() {
  Outcome o;
  for (double alpha : {1.5, 2.0, 4.0}) {
    const LimitLaw law = preset("example2", {{"alpha", alpha}});
    double series_gap = 0.0, round_trip = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double x = i / 99.0;
      series_gap = std::max(series_gap, std::abs(f_eval(law, x) - std::sqrt(1.0 - (1.0 - x) / alpha)));
      const double y = law.f_zero() + 1e-6 + (1.0 - 2e-6 - law.f_zero()) * i / 99.0;
      round_trip = std::max(round_trip, std::abs(f_eval(law, f_star_eval(law, y)) - y));
    }
    // Polar midpoint rule with 10^4 radial nodes; the density is radial.
    const int nodes = 10000;
    const double h = (1.0 - law.f_zero()) / nodes;
    double mass = 0.0;
    for (int i = 0; i < nodes; ++i) {
      const double r = law.f_zero() + (i + 0.5) * h;
      mass += planar_density(law, r) * 2.0 * std::numbers::pi * r * h;
    }
    const std::string a = "alpha=" + fmt("%g", alpha);
    o.require(series_gap <= 1e-10, a + " |F-closed|=" + fmt("%.1e", series_gap));
    o.require(round_trip <= 1e-9, a + " |F(F*(y))-y|=" + fmt("%.1e", round_trip));
    o.require(std::abs(mass - 1.0) <= 1e-6, a + " |mass-1|=" + fmt("%.1e", std::abs(mass - 1.0)));
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  const LimitLaw e2 = preset("example2", {{"alpha", 2.0}});
  const LimitLaw e3 = preset("example3a");
  const LimitLaw e1 = preset("example1");
  const double a = std::abs(f_star_eval(e2, 0.9) - 0.62);
  const double b = std::abs(f_star_density(e2, 0.8) - 3.2);
  const double c = std::abs(f_star_eval(e3, 0.5) - (1.0 + std::log(0.5)));
  double d = 0.0;
  for (int i = 0; i <= 1000; ++i) d = std::max(d, std::abs(f_eval(e1, i / 1000.0) - i / 1000.0));
  o.require(a <= 1e-9, "|F*(0.9)-0.62|=" + fmt("%.1e", a));
  o.require(b <= 1e-9, "|f*(0.8)-3.2|=" + fmt("%.1e", b));
  o.require(c <= 1e-9, "|F*(0.5)-(1+ln 0.5)|=" + fmt("%.1e", c));
  o.require(d <= 1e-9, "max|F(x)-x|=" + fmt("%.1e", d));
  return o;
}

Outcome criterion6() {
  Outcome o;
  for (Eigen::Index n : {10, 50, 200}) {
    double worst_trace = 0.0, worst_logdet = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      Rng r(static_cast<std::uint64_t>(n) * 1000 + static_cast<std::uint64_t>(rep));
      const ScaledProduct p{sample_ginibre(n, n, r), 0.0};
      const InvariantReport inv = spectral_invariant_check(p, eigenvalues(p));
      worst_trace = std::max(worst_trace, inv.trace_residual);
      worst_logdet = std::max(worst_logdet, inv.logdet_residual);
    }
    const double nn = static_cast<double>(n);
    o.require(worst_trace <= 1e-10 * nn, "n=" + std::to_string(n) + " trace " + fmt("%.1e", worst_trace));
    o.require(worst_logdet <= 1e-8 * nn, "n=" + std::to_string(n) + " logdet " + fmt("%.1e", worst_logdet));
  }
  const Eigen::Index n = 100;
  Rng ra(77), rq(78);
  const ComplexMatrix a = sample_ginibre(n, n, ra);
  const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(Eigen::MatrixXcd(sample_ginibre(n, n, rq))).householderQ();
  const ComplexMatrix b = q.adjoint() * a * q;
  auto ea = eigenvalues_raw(a);
  auto eb = eigenvalues_raw(b);
  double worst = 0.0;
  for (const Complex& z : ea) {
    auto best = eb.begin();
    for (auto it = eb.begin(); it != eb.end(); ++it) {
      if (std::abs(*it - z) < std::abs(*best - z)) best = it;
    }
    worst = std::max(worst, std::abs(*best - z));
    eb.erase(best);
  }
  o.require(worst <= 1e-8, "similarity n=100 " + fmt("%.1e", worst));
  return o;
}

Outcome criterion7() {
  Outcome o;
  const ChainSpec spec{2, 2, {2, 4, 2}, 2.0};
  const int trials = 10000;
  const Rng base(7007);
  std::vector<double> sum(2, 0.0), sum_sq(2, 0.0);
  std::vector<std::vector<double>> draws(2);
  for (int t = 0; t < trials; ++t) {
    const OracleSample s = sample_oracle(spec, base.split(static_cast<std::uint64_t>(t)));
    draws[0].push_back(s.log_t[0]);
    draws[1].push_back(s.log_t[1]);
  }
  for (int j = 1; j <= 2; ++j) {
    const auto& v = draws[static_cast<std::size_t>(j - 1)];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= trials;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / (trials - 1) / trials);
    const double expected = expected_log_t(spec, j);
    const double z = (mean - expected) / se;
    o.require(std::abs(z) <= 4.0, "j=" + std::to_string(j) + " mean=" + fmt("%.4f", mean) + " psi-sum=" +
                                      fmt("%.4f", expected) + " z=" + fmt("%.2f", z));
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  const std::vector<std::int64_t> probes{250, 500, 1000, 2000};
  struct Case {
    std::string label;
    DimensionFamily family;
    std::string gamma;
    Verdict expected;
  };
  // Example 1 with m_n = n under its three gamma rules, then other m_n
  // sequences, which keep c_k = 1 under gamma = m_n.
  const std::vector<Case> cases = {
      {"square,m=n,gamma=m", square_family(parse_m_rule("n")), "m", Verdict::TypeI},
      {"square,m=n,gamma=m^2", square_family(parse_m_rule("n")), "m2", Verdict::TypeII},
      {"square,m=n,gamma=1", square_family(parse_m_rule("n")), "one", Verdict::TypeIII},
      {"square,m=sqrt n,gamma=m", square_family(parse_m_rule("sqrt"), "sqrt"), "m", Verdict::TypeI},
      {"square,m=log n,gamma=m", square_family(parse_m_rule("log"), "log"), "m", Verdict::TypeI},
      {"square,m=7,gamma=m", square_family(parse_m_rule("const:7"), "7"), "m", Verdict::TypeI},
  };
  for (const auto& c : cases) {
    const TypeDiagnostics d = classify(c.family, parse_gamma_rule(c.gamma), probes);
    o.require(d.verdict == c.expected, c.label + " -> " + std::string(to_string(d.verdict)));
  }
  for (double alpha : {1.5, 2.0}) {
    const TypeDiagnostics d = classify(example2_family(alpha, parse_m_rule("n")), parse_gamma_rule("2m"), probes);
    double worst = 0.0;
    for (int k = 1; k <= 4 && static_cast<std::size_t>(k) <= d.c_estimates.size(); ++k) {
      const double target = 0.5 * std::pow(alpha, -k);
      worst = std::max(worst, std::abs(d.c_estimates[static_cast<std::size_t>(k - 1)] / target - 1.0));
    }
    o.require(d.verdict == Verdict::TypeI && d.c_estimates.size() >= 4 && worst <= 0.1,
              "example2 alpha=" + fmt("%g", alpha) + " -> " + std::string(to_string(d.verdict)) +
                  " max rel err c_1..c_4=" + fmt("%.4f", worst));
  }
  return o;
}

Outcome criterion9() {
  Outcome o;
  const std::vector<std::int64_t> sizes{50, 200, 800};
  for (double x : {0.25, 0.5, 0.75}) {
    std::vector<TnLimitSummary> s;
    for (auto n : sizes) s.push_back(tnlimit_diagnostic(square_chain(n, 5, 5.0), x, 1000, Rng(9009)));
    bool mean_down = true, std_down = true;
    std::string trace = "x=" + fmt("%g", x) + " |mean|";
    for (std::size_t i = 0; i < s.size(); ++i) {
      trace += " " + fmt("%.5f", std::abs(s[i].mean));
      if (i > 0) {
        mean_down = mean_down && std::abs(s[i].mean) < std::abs(s[i - 1].mean);
        std_down = std_down && s[i].stddev < s[i - 1].stddev;
      }
    }
    trace += " std";
    for (const auto& v : s) trace += " " + fmt("%.5f", v.stddev);
    o.require(mean_down && std_down, trace);
  }
  return o;
}

}  // namespace

int main() {
  const fs::path dir = work_dir();
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << ", "
              << fmt("%.1f", seconds_since(t0)) << "s): " << o.detail << std::endl;
  };

  std::optional<RingRun> fig;
  report(1, "ring coverage at n=400", [&] {
    fig = run_ring_sweep(dir);
    return criterion1(*fig);
  });
  report(2, "radial fit to example2 law", [&] {
    if (!fig) throw std::runtime_error("the n=400 simulation did not complete");
    return criterion2(*fig);
  });
  report(3, "oracle/eigen equality in distribution", criterion3);
  report(4, "example2 analytic agreement", criterion4);
  report(5, "closed-form spot values", criterion5);
  report(6, "eigensolver integrity", criterion6);
  report(7, "digamma means", criterion7);
  report(8, "type classifier", criterion8);
  report(9, "T_[nx] diagnostic monotone in n", criterion9);

  fs::remove_all(dir);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
