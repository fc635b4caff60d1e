#pragma once

namespace rectprod {

// Digamma psi(x) = Gamma'(x) / Gamma(x) for x > 0, via upward recurrence to
// x >= 10 followed by the asymptotic series. Absolute error below 1e-13.
double digamma(double x);

}  // namespace rectprod
