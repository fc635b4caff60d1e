#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "rectprod/chain_spec.hpp"
#include "rectprod/limit_law.hpp"
#include "rectprod/rng.hpp"
#include "rectprod/sampler.hpp"
#include "rectprod/spectrum.hpp"

namespace rectprod {

enum class SampleSource { Eigen, Oracle };

std::string_view to_string(SampleSource source);

struct RadialSample {
  std::vector<double> radii;
  SampleSource source = SampleSource::Eigen;
};

struct PolarPoint {
  double radius = 0.0;
  double angle = 0.0;
};

struct PlanarSample {
  std::vector<PolarPoint> points;
};

struct GofReport {
  double ks_radial = 0.0;
  double wasserstein_radial = 0.0;
  double angle_ks = 0.0;
  double ring_coverage = 0.0;
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::uint64_t seed = 0;
};

/// Scaling map h_n(r) = r^(2/gamma) / a_n applied to log moduli:
/// radius = exp(2 ln r / gamma - ln a_n). -inf maps to 0.
RadialSample h_transform(std::span<const double> log_moduli, const ChainSpec& spec,
                         SampleSource source = SampleSource::Eigen);

// h_n(Y_j) with Y_j = sqrt(T_j).
RadialSample oracle_radii(const OracleSample& sample, const ChainSpec& spec);

// Scaled eigenvalues h_n(|z_j|) e^{i Theta_j} in polar form.
PlanarSample planar_sample(const SpectralSample& spectrum, const ChainSpec& spec);

RadialSample radial_part(const PlanarSample& sample);

double ecdf(const RadialSample& sample, double x);

using Cdf = std::function<double(double)>;
using Quantile = std::function<double(double)>;

// sup_x |ECDF(x) - cdf(x)|, evaluated at each jump from both sides.
double ks_one_sample(const RadialSample& sample, const Cdf& cdf);

double ks_two_sample(const RadialSample& a, const RadialSample& b);

// Exact 1-Wasserstein distance between two empirical measures.
double wasserstein1(const RadialSample& a, const RadialSample& b);

// Mean |a_(j) - quantile((j - 0.5) / n)|.
double wasserstein1(const RadialSample& a, const Quantile& quantile);

// KS statistic of angle / (2 pi) against Unif[0, 1].
double angle_uniformity(const PlanarSample& sample);

// Fraction of points with radius in [inner - slack, outer + slack].
double ring_coverage(const PlanarSample& sample, double inner, double outer, double slack = 0.05);

// Radial law of a limit: CDF F* and quantile function (F for Type I).
Cdf radial_cdf(const LimitLaw& law);
Quantile radial_quantile(const LimitLaw& law);

struct RingBand {
  double inner = 0.0;
  double outer = 1.0;
  double slack = 0.05;
};

GofReport gof_against_law(const PlanarSample& sample, const LimitLaw& law, const RingBand& ring);

struct TnLimitSummary {
  double x = 0.0;
  std::int64_t j = 0;
  double mean = 0.0;
  double stddev = 0.0;
  int replicates = 0;
};

// Samples D = (ln T_[nx] - sum_r ln(l_r + n)) / lambda_1 - g_n(x) across
// replicates (replicate r draws from rng.split(r)); D tends to 0 in
// probability as n grows.
TnLimitSummary tnlimit_diagnostic(const ChainSpec& spec, double x, int replicates, const Rng& rng);

}  // namespace rectprod
