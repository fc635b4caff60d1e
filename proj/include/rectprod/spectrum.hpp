#pragma once

#include <vector>

#include "rectprod/sampler.hpp"

namespace rectprod {

// Eigenvalues in log-polar form. log_modulus includes the product's
// log_scale; an exact zero eigenvalue is -inf with angle 0. Sorted by
// descending log_modulus, then ascending angle.
struct SpectralSample {
  std::vector<double> log_modulus;
  std::vector<double> angle;  // [0, 2 pi)

  std::size_t size() const { return log_modulus.size(); }
};

// Balances in place with powers of two (diagonal similarity), so the
// spectrum is unchanged.
void balance(ComplexMatrix& a);

// All eigenvalues of a square finite matrix: balancing, Hessenberg reduction,
// then shifted complex QR with a budget of 30 n iterations.
std::vector<Complex> eigenvalues_raw(const ComplexMatrix& a);

SpectralSample eigenvalues(const ScaledProduct& p);

// ln |det a| from an LU factorization with partial pivoting; -inf when
// singular.
double log_abs_det(const ComplexMatrix& a);

struct InvariantReport {
  double trace_residual = 0.0;   // |sum lambda - tr| / ||matrix||_F
  double logdet_residual = 0.0;  // |sum ln|lambda| - ln|det||
  double logdet_spectrum = 0.0;
  double logdet_lu = 0.0;
};

// Cross-checks a spectrum against the normalized matrix it came from. Both
// sides exclude log_scale.
InvariantReport spectral_invariant_check(const ScaledProduct& p, const SpectralSample& s);

}  // namespace rectprod
