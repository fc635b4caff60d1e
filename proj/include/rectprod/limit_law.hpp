#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rectprod/chain_spec.hpp"

namespace rectprod {

// One geometric component of a coefficient tail: contributes weight * rho^k
// to c_k. rho = 1 is a constant tail.
struct GeometricTerm {
  double weight = 0.0;
  double rho = 0.0;

  bool operator==(const GeometricTerm&) const = default;
};

// Declared behaviour of c_k past the explicit head. An empty term list is the
// zero tail. Mixtures arise from the fixed-m law.
struct TailRule {
  std::vector<GeometricTerm> terms;

  static TailRule zero() { return {}; }
  static TailRule constant(double c) { return {{{c, 1.0}}}; }
  static TailRule geometric(double c, double rho) { return {{{c, rho}}}; }

  double value(int k) const;
  // Sum over k of c_k / k diverges iff some term has rho = 1 and weight > 0.
  bool summable() const;

  bool operator==(const TailRule&) const = default;
};

// Source of the limiting coefficients c_1, c_2, ...
//
// Explicit sources list c_1..c_H and declare a tail rule for k > H, which
// gives closed-form tail sums. Callable sources compute c_k on demand and
// declare an envelope c_k <= c_1 * rho^(k-1); summation is truncated by that
// bound, and the sum of c_k / k is finite only when rho < 1.
class CoefficientSource {
 public:
  enum class Kind { ExplicitSequence, Callable };

  static CoefficientSource explicit_sequence(std::vector<double> head, TailRule tail);
  static CoefficientSource callable(std::function<double(int)> c, double envelope_rho = 1.0);

  Kind kind() const { return kind_; }
  double operator()(int k) const;
  const std::vector<double>& head() const { return head_; }
  const TailRule& tail() const { return tail_; }
  double envelope_rho() const { return envelope_rho_; }
  bool summable() const;

 private:
  Kind kind_ = Kind::ExplicitSequence;
  std::vector<double> head_;
  TailRule tail_;
  std::function<double(int)> fn_;
  double envelope_rho_ = 1.0;
};

enum class LawType { TypeI, TypeII, TypeIII };

std::string_view to_string(LawType type);

// Limit of the radial distribution functions F_n. Type I laws carry their
// coefficients; Type II (point mass at 1) and Type III (point mass at 0) do
// not.
class LimitLaw {
 public:
  static LimitLaw type2() { return LimitLaw(LawType::TypeII); }
  static LimitLaw type3() { return LimitLaw(LawType::TypeIII); }

  LawType type() const { return type_; }
  const CoefficientSource& coefficients() const;
  // F(0+); zero for laws whose coefficient sum diverges.
  double f_zero() const { return f_zero_; }

 private:
  friend LimitLaw build_type1(CoefficientSource coeffs);
  explicit LimitLaw(LawType type) : type_(type) {}

  LawType type_;
  CoefficientSource coeffs_;
  double f_zero_ = 0.0;
};

// Validates the coefficient conditions (c_1 > 0, c_k in [0, c_1],
// non-increasing from k = 2) and builds F(x) = exp(-sum_k c_k (1-x)^k / k).
LimitLaw build_type1(CoefficientSource coeffs);

double f_eval(const LimitLaw& law, double x);

// Generalized inverse F*(y) = inf{x : F(x) > y}, found by bisection for
// Type I laws.
double f_star_eval(const LimitLaw& law, double y);

// f = F' on (0, 1].
double f_density(const LimitLaw& law, double x);

// f* = 1 / f(F*(y)) on (F(0), 1).
double f_star_density(const LimitLaw& law, double y);

// Density of the planar limit at modulus r: f*(r) / (2 pi r) on the ring
// F(0) <= r <= 1.
double planar_density(const LimitLaw& law, double r);

using PresetParams = std::map<std::string, double>;

// example1, example2 (alpha), example3a, example3b (gamma),
// fixed_m (alpha2, alpha3, ...).
LimitLaw preset(const std::string& name, const PresetParams& params = {});

enum class Verdict { TypeI, TypeII, TypeIII, Inconclusive };

std::string_view to_string(Verdict verdict);

struct ClassifyOptions {
  double low_threshold = 1e-3;
  double high_threshold = 1e3;
  double relative_tolerance = 0.05;
  int stable_window = 3;
  int max_k = 8;
};

struct TypeDiagnostics {
  std::vector<std::int64_t> probe_sizes;
  std::vector<double> c1_estimates;               // lambda_1 / gamma per probe
  std::vector<std::vector<double>> theta_trends;  // [k-1][probe]
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> c_estimates;  // lambda_k / gamma at the largest probe (Type I)
  bool heuristic = true;
  std::string reason;
};

// Finite-probe guess at which of the three limit types a family produces.
// Never a proof: the verdict only reflects the trend over probe_sizes.
TypeDiagnostics classify(const DimensionFamily& family, const GammaRule& gamma_rule,
                         const std::vector<std::int64_t>& probe_sizes,
                         const ClassifyOptions& options = {});

}  // namespace rectprod
