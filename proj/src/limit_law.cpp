#include "rectprod/limit_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace rectprod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTruncation = 1e-14;
constexpr long kMaxTerms = 100'000'000;
constexpr double kBisectWidth = 1e-12;
constexpr int kBisectCap = 200;
constexpr int kCallableCheckTerms = 1000;

// sum_{k > h} u^k / k for u in [0, 1]; one_minus_u = 1 - u supplied exactly.
double log_series_tail(double u, double one_minus_u, std::size_t h) {
  if (u <= 0.0) return 0.0;
  if (one_minus_u <= 0.0) return kInf;
  if (u <= 0.5) {
    double power = std::pow(u, static_cast<double>(h + 1));
    double sum = 0.0;
    for (std::size_t k = h + 1;; ++k) {
      const double term = power / static_cast<double>(k);
      sum += term;
      if (term <= 1e-18 * sum || term < 1e-300) break;
      power *= u;
    }
    return sum;
  }
  double head = 0.0;
  double power = 1.0;
  for (std::size_t k = 1; k <= h; ++k) {
    power *= u;
    head += power / static_cast<double>(k);
  }
  return -std::log(one_minus_u) - head;
}

// -ln F(x) = sum_k c_k t^k / k with t = 1 - x. Taking x keeps 1 - rho t
// accurate as x -> 0.
double neg_log_f(const CoefficientSource& src, double x) {
  const double t = 1.0 - x;
  if (t <= 0.0) return 0.0;
  if (src.kind() == CoefficientSource::Kind::ExplicitSequence) {
    const auto& head = src.head();
    double sum = 0.0;
    double power = 1.0;
    for (std::size_t k = 1; k <= head.size(); ++k) {
      power *= t;
      sum += head[k - 1] * power / static_cast<double>(k);
    }
    for (const auto& term : src.tail().terms) {
      if (term.weight == 0.0) continue;
      sum += term.weight * log_series_tail(term.rho * t, (1.0 - term.rho) + term.rho * x, head.size());
    }
    return sum;
  }
  // Callable: truncate once c_1 * t * (rho t)^K / ((K+1)(1 - rho t)) drops
  // below the tolerance.
  const double rho_t = src.envelope_rho() * t;
  if (rho_t >= 1.0) return kInf;
  const double c1 = src(1);
  double sum = 0.0;
  double power = 1.0;
  double envelope = t;  // t * (rho t)^(k-1)
  for (long k = 1; k <= kMaxTerms; ++k) {
    power *= t;
    sum += src(static_cast<int>(k)) * power / static_cast<double>(k);
    envelope *= rho_t;
    if (c1 * envelope / (static_cast<double>(k + 1) * (1.0 - rho_t)) < kTruncation) return sum;
  }
  throw Error(ErrorCode::ConvergenceFailure, "coefficient series did not reach tolerance");
}

// d/dx of -ln F, i.e. sum_k c_k t^(k-1) with t = 1 - x.
double neg_log_f_slope(const CoefficientSource& src, double x) {
  const double t = 1.0 - x;
  if (src.kind() == CoefficientSource::Kind::ExplicitSequence) {
    const auto& head = src.head();
    double sum = 0.0;
    double power = 1.0;  // t^(k-1)
    for (std::size_t k = 1; k <= head.size(); ++k) {
      sum += head[k - 1] * power;
      power *= t;
    }
    const auto h = static_cast<double>(head.size());
    for (const auto& term : src.tail().terms) {
      if (term.weight == 0.0) continue;
      const double gap = (1.0 - term.rho) + term.rho * x;
      if (gap <= 0.0) return kInf;
      sum += term.weight * std::pow(term.rho, h + 1.0) * std::pow(t, h) / gap;
    }
    return sum;
  }
  const double rho_t = src.envelope_rho() * t;
  if (rho_t >= 1.0) return kInf;
  const double c1 = src(1);
  double sum = 0.0;
  double power = 1.0;
  double envelope = 1.0;  // (rho t)^(k-1)
  for (long k = 1; k <= kMaxTerms; ++k) {
    sum += src(static_cast<int>(k)) * power;
    power *= t;
    envelope *= rho_t;
    if (c1 * envelope / (1.0 - rho_t) < kTruncation) return sum;
  }
  throw Error(ErrorCode::ConvergenceFailure, "coefficient series did not reach tolerance");
}

void require_type1(const LimitLaw& law, const char* what) {
  if (law.type() != LawType::TypeI) {
    throw Error(ErrorCode::TypeError, std::string(what) + " is only defined for Type I laws; use f_star_eval");
  }
}

void check_coefficients(const CoefficientSource& src) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidCoefficients, why); };
  const double c1 = src(1);
  if (!(c1 > 0.0) || !std::isfinite(c1)) fail("c_1 must be finite and positive");

  if (src.kind() == CoefficientSource::Kind::ExplicitSequence) {
    for (const auto& term : src.tail().terms) {
      if (!(term.weight >= 0.0) || !std::isfinite(term.weight)) fail("tail weight must be >= 0");
      if (!(term.rho >= 0.0 && term.rho <= 1.0)) fail("tail rho must lie in [0, 1]");
    }
    // Head values, plus the first tail value (the tail itself is
    // non-increasing because every rho <= 1).
    const int last = static_cast<int>(src.head().size()) + 1;
    double prev = c1;
    for (int k = 2; k <= last; ++k) {
      const double ck = src(k);
      if (!(ck >= 0.0) || !std::isfinite(ck)) fail("c_" + std::to_string(k) + " must be >= 0");
      if (ck > c1) fail("c_" + std::to_string(k) + " exceeds c_1");
      if (k > 2 && ck > prev) fail("c_k must be non-increasing for k >= 2 (k=" + std::to_string(k) + ")");
      prev = ck;
    }
    return;
  }

  const double rho = src.envelope_rho();
  if (!(rho >= 0.0 && rho <= 1.0)) fail("envelope rho must lie in [0, 1]");
  double prev = c1;
  double envelope = c1;
  for (int k = 2; k <= kCallableCheckTerms; ++k) {
    const double ck = src(k);
    envelope *= rho;
    if (!(ck >= 0.0) || !std::isfinite(ck)) fail("c_" + std::to_string(k) + " must be >= 0");
    if (ck > c1) fail("c_" + std::to_string(k) + " exceeds c_1");
    if (k > 2 && ck > prev) fail("c_k must be non-increasing for k >= 2 (k=" + std::to_string(k) + ")");
    if (ck > envelope * (1.0 + 1e-12)) fail("c_" + std::to_string(k) + " exceeds the declared envelope");
    prev = ck;
  }
}

}  // namespace

double TailRule::value(int k) const {
  double sum = 0.0;
  for (const auto& term : terms) sum += term.weight * std::pow(term.rho, k);
  return sum;
}

bool TailRule::summable() const {
  return std::none_of(terms.begin(), terms.end(),
                      [](const GeometricTerm& t) { return t.rho >= 1.0 && t.weight > 0.0; });
}

CoefficientSource CoefficientSource::explicit_sequence(std::vector<double> head, TailRule tail) {
  CoefficientSource src;
  src.kind_ = Kind::ExplicitSequence;
  src.head_ = std::move(head);
  src.tail_ = std::move(tail);
  return src;
}

CoefficientSource CoefficientSource::callable(std::function<double(int)> c, double envelope_rho) {
  CoefficientSource src;
  src.kind_ = Kind::Callable;
  src.fn_ = std::move(c);
  src.envelope_rho_ = envelope_rho;
  return src;
}

double CoefficientSource::operator()(int k) const {
  if (kind_ == Kind::Callable) return fn_(k);
  if (k >= 1 && static_cast<std::size_t>(k) <= head_.size()) {
    return head_[static_cast<std::size_t>(k - 1)];
  }
  return tail_.value(k);
}

bool CoefficientSource::summable() const {
  if (kind_ == Kind::Callable) return envelope_rho_ < 1.0;
  return tail_.summable();
}

std::string_view to_string(LawType type) {
  switch (type) {
    case LawType::TypeI: return "I";
    case LawType::TypeII: return "II";
    case LawType::TypeIII: return "III";
  }
  return "?";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::TypeI: return "TypeI";
    case Verdict::TypeII: return "TypeII";
    case Verdict::TypeIII: return "TypeIII";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

const CoefficientSource& LimitLaw::coefficients() const {
  require_type1(*this, "coefficients");
  return coeffs_;
}

LimitLaw build_type1(CoefficientSource coeffs) {
  check_coefficients(coeffs);
  LimitLaw law(LawType::TypeI);
  law.coeffs_ = std::move(coeffs);
  law.f_zero_ = law.coeffs_.summable() ? std::exp(-neg_log_f(law.coeffs_, 0.0)) : 0.0;
  return law;
}

double f_eval(const LimitLaw& law, double x) {
  require_type1(law, "F");
  if (x <= 0.0) return x < 0.0 ? 0.0 : law.f_zero();
  if (x >= 1.0) return 1.0;
  return std::exp(-neg_log_f(law.coefficients(), x));
}

double f_star_eval(const LimitLaw& law, double y) {
  switch (law.type()) {
    case LawType::TypeII: return y < 1.0 ? 0.0 : 1.0;
    case LawType::TypeIII: return y < 0.0 ? 0.0 : 1.0;
    case LawType::TypeI: break;
  }
  if (y >= 1.0) return 1.0;
  if (y <= law.f_zero()) return 0.0;

  double lo = 0.0, hi = 1.0;
  double f_lo = law.f_zero(), f_hi = 1.0;
  for (int iter = 0; iter < kBisectCap; ++iter) {
    // Stop on interval width, and also on value resolution so that steep
    // laws near 0 still invert accurately.
    if (hi - lo < kBisectWidth && f_hi - f_lo < kBisectWidth) return 0.5 * (lo + hi);
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f_eval(law, mid);
    if (f_mid > y) {
      hi = mid;
      f_hi = f_mid;
    } else {
      lo = mid;
      f_lo = f_mid;
    }
  }
  throw Error(ErrorCode::ConvergenceFailure,
              "F* bisection exceeded " + std::to_string(kBisectCap) + " iterations at y=" + std::to_string(y));
}

double f_density(const LimitLaw& law, double x) {
  require_type1(law, "f");
  if (!(x > 0.0) || x > 1.0) {
    throw Error(ErrorCode::DomainError, "f requires x in (0, 1], got " + std::to_string(x));
  }
  const auto& src = law.coefficients();
  return f_eval(law, x) * neg_log_f_slope(src, x);
}

double f_star_density(const LimitLaw& law, double y) {
  require_type1(law, "f*");
  if (!(y > law.f_zero()) || !(y < 1.0)) {
    throw Error(ErrorCode::DomainError, "f* requires y in (F(0), 1), got " + std::to_string(y));
  }
  return 1.0 / f_density(law, f_star_eval(law, y));
}

double planar_density(const LimitLaw& law, double r) {
  require_type1(law, "planar density");
  if (!(r > law.f_zero()) || r > 1.0) return 0.0;
  const double f_star = r == 1.0 ? 1.0 / f_density(law, 1.0) : f_star_density(law, r);
  return f_star / (2.0 * std::numbers::pi * r);
}

namespace {

double param(const PresetParams& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double required_param(const PresetParams& params, const std::string& key, const std::string& preset) {
  auto it = params.find(key);
  if (it == params.end()) {
    throw Error(ErrorCode::BadParameter, "preset " + preset + " needs parameter '" + key + "'");
  }
  return it->second;
}

void reject_unknown(const PresetParams& params, std::initializer_list<std::string> allowed,
                    const std::string& preset) {
  for (const auto& [key, value] : params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorCode::BadParameter, "preset " + preset + " has no parameter '" + key + "'");
    }
  }
}

}  // namespace

LimitLaw preset(const std::string& name, const PresetParams& params) {
  if (name == "example1") {
    reject_unknown(params, {}, name);
    return build_type1(CoefficientSource::explicit_sequence({}, TailRule::constant(1.0)));
  }
  if (name == "example2") {
    reject_unknown(params, {"alpha"}, name);
    const double alpha = required_param(params, "alpha", name);
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
      throw Error(ErrorCode::BadParameter, "example2 needs alpha >= 1");
    }
    // c_k = alpha^-k / 2 for every k >= 1.
    return build_type1(CoefficientSource::explicit_sequence({}, TailRule::geometric(0.5, 1.0 / alpha)));
  }
  if (name == "example3a") {
    reject_unknown(params, {}, name);
    return build_type1(CoefficientSource::explicit_sequence({1.0}, TailRule::zero()));
  }
  if (name == "example3b") {
    reject_unknown(params, {"gamma"}, name);
    const double gamma = param(params, "gamma", 0.0);
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
      throw Error(ErrorCode::BadParameter, "example3b needs gamma >= 0");
    }
    // F(x) = x^(1/2) exp(gamma (x-1) / 2): c_1 = (1+gamma)/2, c_k = 1/2 after.
    return build_type1(CoefficientSource::explicit_sequence({(1.0 + gamma) / 2.0}, TailRule::constant(0.5)));
  }
  if (name == "fixed_m") {
    // Keys alpha2, alpha3, ... in any order; all must lie in [0, 1].
    TailRule tail = TailRule::constant(0.5);
    for (const auto& [key, value] : params) {
      if (key.rfind("alpha", 0) != 0 || key.size() == 5 ||
          !std::all_of(key.begin() + 5, key.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw Error(ErrorCode::BadParameter, "fixed_m parameters are alpha2, alpha3, ...; got '" + key + "'");
      }
      if (!(value >= 0.0 && value <= 1.0)) {
        throw Error(ErrorCode::BadParameter, "fixed_m needs " + key + " in [0, 1]");
      }
      tail.terms.push_back({0.5, value});
    }
    return build_type1(CoefficientSource::explicit_sequence({}, std::move(tail)));
  }
  throw Error(ErrorCode::UnknownPreset, "no limit-law preset named '" + name + "'");
}

TypeDiagnostics classify(const DimensionFamily& family, const GammaRule& gamma_rule,
                         const std::vector<std::int64_t>& probe_sizes, const ClassifyOptions& options) {
  if (probe_sizes.size() < 4 || !std::is_sorted(probe_sizes.begin(), probe_sizes.end(), std::less_equal<>())) {
    throw Error(ErrorCode::BadParameter, "probe sizes must be strictly increasing with at least 4 entries");
  }
  if (options.stable_window < 2 || static_cast<std::size_t>(options.stable_window) > probe_sizes.size()) {
    throw Error(ErrorCode::BadParameter, "stable_window must lie in [2, number of probes]");
  }

  TypeDiagnostics diag;
  diag.probe_sizes = probe_sizes;
  diag.theta_trends.assign(static_cast<std::size_t>(options.max_k), {});
  std::vector<double> lambdas_at_last;
  for (const auto n : probe_sizes) {
    ChainSpec spec = family.generator(n);
    spec.gamma = 1.0;
    spec.gamma = gamma_rule(spec);
    const ChainStats stats(spec, options.max_k);
    diag.c1_estimates.push_back(stats.lambda(1) / spec.gamma);
    for (int k = 1; k <= options.max_k; ++k) {
      diag.theta_trends[static_cast<std::size_t>(k - 1)].push_back(stats.theta(k));
    }
    if (n == probe_sizes.back()) {
      for (int k = 1; k <= options.max_k; ++k) lambdas_at_last.push_back(stats.lambda(k) / spec.gamma);
    }
  }

  const auto& r = diag.c1_estimates;
  const double last = r.back();
  bool stable = std::isfinite(last) && last > 0.0;
  for (std::size_t i = r.size() - static_cast<std::size_t>(options.stable_window); i < r.size(); ++i) {
    stable = stable && std::abs(r[i] - last) <= options.relative_tolerance * last;
  }
  const bool decreasing = std::adjacent_find(r.begin(), r.end(), std::less_equal<>()) == r.end();
  const bool increasing = std::adjacent_find(r.begin(), r.end(), std::greater_equal<>()) == r.end();

  if (stable) {
    diag.verdict = Verdict::TypeI;
    diag.c_estimates = lambdas_at_last;
    diag.reason = "lambda_1/gamma stable within relative tolerance over the last probes";
  } else if (decreasing && last < options.low_threshold) {
    diag.verdict = Verdict::TypeII;
    diag.reason = "lambda_1/gamma strictly decreasing and below the low threshold";
  } else if (increasing && last > options.high_threshold) {
    diag.verdict = Verdict::TypeIII;
    diag.reason = "lambda_1/gamma strictly increasing and above the high threshold";
  } else {
    diag.verdict = Verdict::Inconclusive;
    diag.reason = "no stable limit or clear trend over the probed sizes";
  }
  return diag;
}

}  // namespace rectprod
