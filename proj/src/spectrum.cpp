#include "rectprod/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace rectprod {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double abs1(const Complex& z) { return std::abs(z.real()) + std::abs(z.imag()); }

void require_square_finite(const ComplexMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "eigenvalues need a non-empty square matrix");
  }
  if (!a.allFinite()) throw Error(ErrorCode::NumericalBreakdown, "non-finite matrix entry");
}

}  // namespace

void balance(ComplexMatrix& a) {
  constexpr double kRadix = 2.0;
  constexpr double kRadix2 = kRadix * kRadix;
  const Eigen::Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double col = 0.0, row = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        col += abs1(a(j, i));
        row += abs1(a(i, j));
      }
      if (col == 0.0 || row == 0.0) continue;
      double g = row / kRadix;
      double f = 1.0;
      const double s = col + row;
      while (col < g) {
        f *= kRadix;
        col *= kRadix2;
      }
      g = row * kRadix;
      while (col > g) {
        f /= kRadix;
        col /= kRadix2;
      }
      if ((col + row) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

namespace {

// A row (or column) whose off-diagonal entries are all zero makes its
// diagonal entry an exact eigenvalue; the rest of the spectrum is that of the
// matrix with the row and column removed.
std::vector<Complex> isolate_eigenvalues(ComplexMatrix& a) {
  std::vector<Complex> isolated;
  bool found = true;
  while (found && a.rows() > 1) {
    found = false;
    const Eigen::Index n = a.rows();
    for (Eigen::Index i = 0; i < n && !found; ++i) {
      bool row_zero = true, col_zero = true;
      for (Eigen::Index j = 0; j < n && (row_zero || col_zero); ++j) {
        if (j == i) continue;
        row_zero = row_zero && a(i, j) == Complex(0.0);
        col_zero = col_zero && a(j, i) == Complex(0.0);
      }
      if (!row_zero && !col_zero) continue;
      isolated.push_back(a(i, i));
      ComplexMatrix reduced(n - 1, n - 1);
      for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
          if (c == i) continue;
          reduced(rr, cc++) = a(r, c);
        }
        ++rr;
      }
      a = std::move(reduced);
      found = true;
    }
  }
  return isolated;
}

}  // namespace

std::vector<Complex> eigenvalues_raw(const ComplexMatrix& a) {
  require_square_finite(a);
  ComplexMatrix work = a;
  std::vector<Complex> result = isolate_eigenvalues(work);
  const Eigen::Index n = work.rows();
  if (n == 1) {
    result.push_back(work(0, 0));
    return result;
  }

  balance(work);
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(n);
  schur.setMaxIterations(30 * n);
  schur.compute(Eigen::MatrixXcd(work), /*computeU=*/false);
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "QR iteration exceeded 30n iterations");
  }
  const auto& t = schur.matrixT();
  for (Eigen::Index i = 0; i < n; ++i) result.push_back(t(i, i));
  return result;
}

SpectralSample eigenvalues(const ScaledProduct& p) {
  if (!std::isfinite(p.log_scale)) throw Error(ErrorCode::NumericalBreakdown, "non-finite log_scale");
  const auto lambdas = eigenvalues_raw(p.matrix);
  const std::size_t n = lambdas.size();

  std::vector<double> log_mod(n), angle(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double modulus = std::abs(lambdas[j]);
    if (modulus == 0.0) {
      log_mod[j] = kNegInf;
      angle[j] = 0.0;
      continue;
    }
    log_mod[j] = std::log(modulus) + p.log_scale;
    double theta = std::atan2(lambdas[j].imag(), lambdas[j].real());
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    if (theta >= 2.0 * std::numbers::pi) theta = 0.0;
    angle[j] = theta;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (log_mod[x] != log_mod[y]) return log_mod[x] > log_mod[y];
    return angle[x] < angle[y];
  });
  SpectralSample s;
  s.log_modulus.reserve(n);
  s.angle.reserve(n);
  for (const auto idx : order) {
    s.log_modulus.push_back(log_mod[idx]);
    s.angle.push_back(angle[idx]);
  }
  return s;
}

double log_abs_det(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "determinant needs a square matrix");
  Eigen::MatrixXcd lu = a;
  const Eigen::Index n = lu.rows();
  double log_det = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pivot = k;
    double best = std::abs(lu(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double v = std::abs(lu(i, k));
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best == 0.0) return kNegInf;
    if (pivot != k) lu.row(k).swap(lu.row(pivot));
    log_det += std::log(best);
    const Complex inv = 1.0 / lu(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const Complex factor = lu(i, k) * inv;
      if (factor == Complex(0.0)) continue;
      lu.block(i, k + 1, 1, n - k - 1) -= factor * lu.block(k, k + 1, 1, n - k - 1);
    }
  }
  return log_det;
}

InvariantReport spectral_invariant_check(const ScaledProduct& p, const SpectralSample& s) {
  InvariantReport report;
  Complex sum(0.0);
  double log_sum = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double lm = s.log_modulus[j] - p.log_scale;
    log_sum += lm;
    if (std::isfinite(lm)) sum += std::polar(std::exp(lm), s.angle[j]);
  }
  const double frob = p.matrix.norm();
  const double trace_gap = std::abs(sum - p.matrix.trace());
  report.trace_residual = frob > 0.0 ? trace_gap / frob : trace_gap;

  report.logdet_spectrum = log_sum;
  report.logdet_lu = log_abs_det(p.matrix);
  if (std::isinf(report.logdet_spectrum) && std::isinf(report.logdet_lu) &&
      report.logdet_spectrum < 0 && report.logdet_lu < 0) {
    report.logdet_residual = 0.0;
  } else {
    report.logdet_residual = std::abs(report.logdet_spectrum - report.logdet_lu);
  }
  return report;
}

}  // namespace rectprod
