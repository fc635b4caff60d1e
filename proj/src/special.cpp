#include "rectprod/special.hpp"

#include <cmath>
#include <string>

#include "rectprod/error.hpp"

namespace rectprod {

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::DomainError, "digamma needs finite x > 0, got " + std::to_string(x));
  }
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  // psi(x) ~ ln x - 1/(2x) - sum_k B_2k / (2k x^2k)
  const double inv2 = 1.0 / (x * x);
  const double series =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 * (1.0 / 12)))))));
  return shift + std::log(x) - 0.5 / x - series;
}

}  // namespace rectprod
