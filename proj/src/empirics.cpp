#include "rectprod/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace rectprod {

namespace {

std::vector<double> sorted_radii(const RadialSample& s) {
  if (s.radii.empty()) throw Error(ErrorCode::EmptySample, "sample has no points");
  std::vector<double> v = s.radii;
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::string_view to_string(SampleSource source) {
  return source == SampleSource::Eigen ? "eigen" : "oracle";
}

RadialSample h_transform(std::span<const double> log_moduli, const ChainSpec& spec, SampleSource source) {
  require_valid(spec);
  const double log_a = log_a_n(spec);
  RadialSample out;
  out.source = source;
  out.radii.reserve(log_moduli.size());
  for (const double lm : log_moduli) {
    out.radii.push_back(lm == -std::numeric_limits<double>::infinity()
                            ? 0.0
                            : std::exp(2.0 * lm / spec.gamma - log_a));
  }
  return out;
}

RadialSample oracle_radii(const OracleSample& sample, const ChainSpec& spec) {
  std::vector<double> log_y(sample.log_t.size());
  std::transform(sample.log_t.begin(), sample.log_t.end(), log_y.begin(), [](double v) { return 0.5 * v; });
  return h_transform(log_y, spec, SampleSource::Oracle);
}

PlanarSample planar_sample(const SpectralSample& spectrum, const ChainSpec& spec) {
  const RadialSample radial = h_transform(spectrum.log_modulus, spec);
  PlanarSample out;
  out.points.reserve(radial.radii.size());
  for (std::size_t j = 0; j < radial.radii.size(); ++j) {
    out.points.push_back({radial.radii[j], spectrum.angle[j]});
  }
  return out;
}

RadialSample radial_part(const PlanarSample& sample) {
  RadialSample out;
  out.radii.reserve(sample.points.size());
  for (const auto& p : sample.points) out.radii.push_back(p.radius);
  return out;
}

double ecdf(const RadialSample& sample, double x) {
  if (sample.radii.empty()) throw Error(ErrorCode::EmptySample, "ECDF of an empty sample");
  const auto count = std::count_if(sample.radii.begin(), sample.radii.end(), [x](double r) { return r <= x; });
  return static_cast<double>(count) / static_cast<double>(sample.radii.size());
}

double ks_one_sample(const RadialSample& sample, const Cdf& cdf) {
  const auto v = sorted_radii(sample);
  const auto n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double below = static_cast<double>(i) / n;  // ECDF just left of the jump
    const double at = static_cast<double>(j) / n;
    const double left_limit = cdf(std::nextafter(v[i], -std::numeric_limits<double>::infinity()));
    d = std::max({d, std::abs(at - cdf(v[i])), std::abs(below - left_limit)});
    i = j;
  }
  return d;
}

double ks_two_sample(const RadialSample& a, const RadialSample& b) {
  const auto va = sorted_radii(a);
  const auto vb = sorted_radii(b);
  const auto na = static_cast<double>(va.size());
  const auto nb = static_cast<double>(vb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < va.size() || j < vb.size()) {
    double x;
    if (j == vb.size() || (i < va.size() && va[i] <= vb[j])) {
      x = va[i];
    } else {
      x = vb[j];
    }
    while (i < va.size() && va[i] == x) ++i;
    while (j < vb.size() && vb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double wasserstein1(const RadialSample& a, const RadialSample& b) {
  const auto va = sorted_radii(a);
  const auto vb = sorted_radii(b);
  const auto na = static_cast<double>(va.size());
  const auto nb = static_cast<double>(vb.size());
  // Integral of |F_a - F_b| over the merged breakpoints.
  std::size_t i = 0, j = 0;
  double total = 0.0;
  double prev = std::min(va.front(), vb.front());
  while (i < va.size() || j < vb.size()) {
    double x;
    if (j == vb.size() || (i < va.size() && va[i] <= vb[j])) {
      x = va[i];
    } else {
      x = vb[j];
    }
    total += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (x - prev);
    while (i < va.size() && va[i] == x) ++i;
    while (j < vb.size() && vb[j] == x) ++j;
    prev = x;
  }
  return total;
}

double wasserstein1(const RadialSample& a, const Quantile& quantile) {
  const auto v = sorted_radii(a);
  const auto n = static_cast<double>(v.size());
  double total = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    total += std::abs(v[j] - quantile((static_cast<double>(j) + 0.5) / n));
  }
  return total / n;
}

double angle_uniformity(const PlanarSample& sample) {
  RadialSample scaled;
  scaled.radii.reserve(sample.points.size());
  for (const auto& p : sample.points) scaled.radii.push_back(p.angle / (2.0 * std::numbers::pi));
  return ks_one_sample(scaled, [](double u) { return std::clamp(u, 0.0, 1.0); });
}

double ring_coverage(const PlanarSample& sample, double inner, double outer, double slack) {
  if (sample.points.empty()) return 0.0;
  const double lo = inner - slack;
  const double hi = outer + slack;
  const auto inside = std::count_if(sample.points.begin(), sample.points.end(),
                                    [&](const PolarPoint& p) { return p.radius >= lo && p.radius <= hi; });
  return static_cast<double>(inside) / static_cast<double>(sample.points.size());
}

Cdf radial_cdf(const LimitLaw& law) {
  return [law](double r) { return f_star_eval(law, r); };
}

Quantile radial_quantile(const LimitLaw& law) {
  switch (law.type()) {
    case LawType::TypeII: return [](double) { return 1.0; };
    case LawType::TypeIII: return [](double) { return 0.0; };
    case LawType::TypeI: break;
  }
  return [law](double u) { return f_eval(law, u); };
}

GofReport gof_against_law(const PlanarSample& sample, const LimitLaw& law, const RingBand& ring) {
  const RadialSample radial = radial_part(sample);
  GofReport report;
  report.ks_radial = ks_one_sample(radial, radial_cdf(law));
  report.wasserstein_radial = wasserstein1(radial, radial_quantile(law));
  report.angle_ks = angle_uniformity(sample);
  report.ring_coverage = ring_coverage(sample, ring.inner, ring.outer, ring.slack);
  return report;
}

TnLimitSummary tnlimit_diagnostic(const ChainSpec& spec, double x, int replicates, const Rng& rng) {
  require_valid(spec);
  if (!(x > 0.0) || x > 1.0) {
    throw Error(ErrorCode::DomainError, "diagnostic needs x in (0, 1], got " + std::to_string(x));
  }
  if (replicates < 100) throw Error(ErrorCode::BadParameter, "diagnostic needs at least 100 replicates");
  const auto j = static_cast<std::int64_t>(std::floor(static_cast<double>(spec.n) * x));
  if (j < 1) throw Error(ErrorCode::DomainError, "[n x] must be at least 1");

  const auto l = offsets(spec);
  double centre = 0.0;
  for (const auto lr : l) centre += std::log(static_cast<double>(lr + spec.n));
  const double lambda1 = lambda_k(spec, 1);
  const double g = g_n_eval(spec, x);

  std::vector<double> d(static_cast<std::size_t>(replicates));
  for (int r = 0; r < replicates; ++r) {
    Rng stream = rng.split(static_cast<std::uint64_t>(r));
    d[static_cast<std::size_t>(r)] = (sample_log_t(l, j, stream) - centre) / lambda1 - g;
  }
  const double count = replicates;
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / count;
  double ss = 0.0;
  for (const double v : d) ss += (v - mean) * (v - mean);
  const double var = ss / (count - 1.0);
  return {x, j, mean, std::sqrt(var), replicates};
}

}  // namespace rectprod
