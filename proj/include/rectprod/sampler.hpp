#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "rectprod/chain_spec.hpp"
#include "rectprod/rng.hpp"

namespace rectprod {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// The represented matrix is exp(log_scale) * matrix. Keeping the scale out
// of the entries lets products of many factors stay in floating-point range.
struct ScaledProduct {
  ComplexMatrix matrix;
  double log_scale = 0.0;
};

// ln T_j for j = 1..n (stored at index j-1), where T_j is a product of
// independent Gamma(l_r + j) variables. Y_j = exp(log_t[j-1] / 2).
struct OracleSample {
  std::vector<double> log_t;
};

// Standard complex normal: real and imaginary parts independent N(0, 1/2),
// so E|Z|^2 = 1.
Complex standard_complex_normal(Rng& rng);

double standard_normal(Rng& rng);

// Gamma(shape, 1) by Marsaglia-Tsang rejection.
double sample_gamma(double shape, Rng& rng);

ComplexMatrix sample_ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng);

// X_1 X_2 ... X_m with Frobenius renormalization after every step. Factor j
// draws from trial_rng.split(j).
ScaledProduct product_chain(const ChainSpec& spec, const Rng& trial_rng);

// Gamma-product oracle; index j draws from trial_rng.split(j).
OracleSample sample_oracle(const ChainSpec& spec, const Rng& trial_rng);

// ln T_j alone, drawing from rng directly.
double sample_log_t(const std::vector<std::int64_t>& offsets, std::int64_t j, Rng& rng);

// E[ln T_j] = sum_r psi(l_r + j).
double expected_log_t(const ChainSpec& spec, std::int64_t j);

}  // namespace rectprod
