#include "rectprod/sampler.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rectprod/special.hpp"

namespace rectprod {

Complex standard_complex_normal(Rng& rng) {
  // Box-Muller: |Z|^2 = -ln u is Exp(1) and the phase is uniform.
  const double radius = std::sqrt(-std::log(rng.uniform()));
  const double phase = 2.0 * std::numbers::pi * rng.uniform();
  return {radius * std::cos(phase), radius * std::sin(phase)};
}

double standard_normal(Rng& rng) {
  const double radius = std::sqrt(-2.0 * std::log(rng.uniform()));
  return radius * std::cos(2.0 * std::numbers::pi * rng.uniform());
}

double sample_gamma(double shape, Rng& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw Error(ErrorCode::BadParameter, "gamma shape must be positive, got " + std::to_string(shape));
  }
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a)
    const double boosted = sample_gamma(shape + 1.0, rng);
    return boosted * std::pow(rng.uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

ComplexMatrix sample_ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  ComplexMatrix x(rows, cols);
  Complex* data = x.data();
  for (Eigen::Index i = 0; i < x.size(); ++i) data[i] = standard_complex_normal(rng);
  return x;
}

namespace {

void normalize(ScaledProduct& p) {
  const double norm = p.matrix.norm();
  if (!std::isfinite(norm)) {
    throw Error(ErrorCode::NumericalBreakdown, "non-finite entry in running product");
  }
  if (norm > 0.0) {
    p.matrix /= norm;
    p.log_scale += std::log(norm);
  }
}

}  // namespace

ScaledProduct product_chain(const ChainSpec& spec, const Rng& trial_rng) {
  require_valid(spec);
  ScaledProduct p;
  for (std::int64_t j = 0; j < spec.m; ++j) {
    Rng factor_rng = trial_rng.split(static_cast<std::uint64_t>(j + 1));
    const auto rows = static_cast<Eigen::Index>(spec.dims[static_cast<std::size_t>(j)]);
    const auto cols = static_cast<Eigen::Index>(spec.dims[static_cast<std::size_t>(j + 1)]);
    ComplexMatrix factor = sample_ginibre(rows, cols, factor_rng);
    if (j == 0) {
      p.matrix = std::move(factor);
    } else {
      ComplexMatrix next = p.matrix * factor;
      p.matrix = std::move(next);
    }
    normalize(p);
  }
  return p;
}

double sample_log_t(const std::vector<std::int64_t>& offsets, std::int64_t j, Rng& rng) {
  double log_t = 0.0;
  for (const auto l : offsets) {
    const double s = sample_gamma(static_cast<double>(l + j), rng);
    if (s < 1e-300) {
      throw Error(ErrorCode::NumericalBreakdown, "gamma sample underflow");
    }
    log_t += std::log(s);
  }
  return log_t;
}

OracleSample sample_oracle(const ChainSpec& spec, const Rng& trial_rng) {
  require_valid(spec);
  const auto l = offsets(spec);
  OracleSample out;
  out.log_t.resize(static_cast<std::size_t>(spec.n));
  for (std::int64_t j = 1; j <= spec.n; ++j) {
    Rng rng = trial_rng.split(static_cast<std::uint64_t>(j));
    out.log_t[static_cast<std::size_t>(j - 1)] = sample_log_t(l, j, rng);
  }
  return out;
}

double expected_log_t(const ChainSpec& spec, std::int64_t j) {
  require_valid(spec);
  if (j < 1 || j > spec.n) {
    throw Error(ErrorCode::DomainError, "expected_log_t needs 1 <= j <= n");
  }
  double sum = 0.0;
  for (const auto l : offsets(spec)) sum += digamma(static_cast<double>(l + j));
  return sum;
}

}  // namespace rectprod
