#include <doctest.h>

#include <cmath>
#include <random>

#include "rectprod/chain_spec.hpp"

using namespace rectprod;

namespace {

ChainSpec spec_242() { return ChainSpec{2, 2, {2, 4, 2}, 2.0}; }

// (100, 200 x 49, 100)
ChainSpec ring_chain() { return rectangular_chain(100, 50, 200, 100.0); }

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::ParseError;
}

// Random valid chains for property checks.
ChainSpec random_chain(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> n_dist(1, 30), m_dist(1, 12), extra(0, 40);
  std::uniform_real_distribution<double> g_dist(0.1, 20.0);
  const int n = n_dist(gen);
  const int m = m_dist(gen);
  ChainSpec s{n, m, std::vector<std::int64_t>(static_cast<std::size_t>(m) + 1, n), g_dist(gen)};
  for (int j = 1; j < m; ++j) s.dims[static_cast<std::size_t>(j)] = n + extra(gen);
  return s;
}

}  // namespace

TEST_SUITE("chain_spec") {
  TEST_CASE("validate examples") {
    CHECK_FALSE(validate(spec_242()).has_value());
    CHECK(validate(ChainSpec{2, 2, {2, 1, 2}, 2.0}) == ErrorCode::MinViolation);
    CHECK(validate(ChainSpec{3, 1, {3, 4}, 1.0}) == ErrorCode::EndpointMismatch);
    CHECK(validate(ChainSpec{2, 2, {2, 2}, 1.0}) == ErrorCode::DimensionMismatch);
    CHECK(validate(ChainSpec{2, 1, {2, 2}, 0.0}) == ErrorCode::NonPositiveGamma);
    CHECK(validate(ChainSpec{2, 1, {2, 2}, -1.0}) == ErrorCode::NonPositiveGamma);
    CHECK(validate(ChainSpec{2, 1, {2, 2}, NAN}) == ErrorCode::NonPositiveGamma);
    CHECK(code_of([] { require_valid(ChainSpec{2, 2, {2, 1, 2}, 2.0}); }) == ErrorCode::MinViolation);
    CHECK(code_of([] { square_chain(0, 3, 1.0); }) == ErrorCode::DimensionMismatch);
  }

  TEST_CASE("offsets") {
    CHECK(offsets(spec_242()) == std::vector<std::int64_t>{0, 2});
    const auto l = offsets(ring_chain());
    REQUIRE(l.size() == 50);
    CHECK(l.front() == 0);
    CHECK(l[1] == 100);
    CHECK(l.back() == 100);
  }

  TEST_CASE("lambda_k and theta_k examples") {
    const ChainSpec c = ring_chain();
    CHECK(lambda_k(c, 1) == doctest::Approx(1.0 + 49 * 0.5).epsilon(1e-15));
    CHECK(lambda_k(c, 2) == doctest::Approx(1.0 + 49 * 0.25).epsilon(1e-15));
    CHECK(theta_k(c, 2) == doctest::Approx(13.25 / 25.5).epsilon(1e-15));
    CHECK(theta_k(c, 2) == doctest::Approx(0.5196078).epsilon(1e-7));
    CHECK(theta_k(c, 1) == 1.0);
    const ChainSpec sq = square_chain(7, 9, 9.0);
    for (int k = 1; k <= 6; ++k) CHECK(lambda_k(sq, k) == 9.0);
    CHECK(theta_k(sq, 5) == 1.0);
  }

  TEST_CASE("ChainStats matches direct sums and extends past the cap") {
    const ChainSpec c = ring_chain();
    const ChainStats stats(c, 4);
    for (int k = 1; k <= 10; ++k) {
      CHECK(stats.lambda(k) == doctest::Approx(1.0 + 49 * std::pow(0.5, k)).epsilon(1e-14));
      CHECK(stats.theta(k) == doctest::Approx(theta_k(c, k)).epsilon(1e-14));
    }
    CHECK(code_of([&] { stats.lambda(0); }) == ErrorCode::DomainError);
  }

  TEST_CASE("f_n_eval examples") {
    CHECK(f_n_eval(spec_242(), 0.5) == doctest::Approx(std::sqrt(0.5 * 0.75)).epsilon(1e-15));
    CHECK(f_n_eval(spec_242(), 0.5) == doctest::Approx(0.6123724).epsilon(1e-7));
    CHECK(f_n_eval(spec_242(), 1.0) == 1.0);
    CHECK(f_n_eval(spec_242(), 0.0) == 0.0);
    CHECK(f_n_eval(spec_242(), -0.5) == 0.0);
    CHECK(f_n_eval(spec_242(), 1.5) == 1.0);
  }

  TEST_CASE("f_n_eval survives products of many factors") {
    // 10^4 factors each below 1 would underflow a direct product.
    const ChainSpec big = square_chain(5, 10000, 1.0);
    const double v = f_n_eval(big, 0.9);
    CHECK(v == 0.0);  // 0.9^10000 is below the smallest subnormal
    const ChainSpec scaled = square_chain(5, 10000, 10000.0);
    CHECK(f_n_eval(scaled, 0.9) == doctest::Approx(0.9).epsilon(1e-12));
  }

  TEST_CASE("g_n_eval examples") {
    const double g = g_n_eval(spec_242(), 0.5);
    CHECK(g == doctest::Approx(std::log(0.375) / 1.5).epsilon(1e-14));
    CHECK(g == doctest::Approx(-0.6539).epsilon(1e-4));
    CHECK(-0.5 >= g);
    CHECK(g >= std::log(0.5));
    CHECK(g_n_eval(spec_242(), 1.0) == 0.0);
    const ChainSpec sq = square_chain(6, 4, 4.0);
    CHECK(g_n_eval(sq, std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(code_of([] { g_n_eval(spec_242(), 0.0); }) == ErrorCode::DomainError);
    CHECK(code_of([] { g_n_eval(spec_242(), -1.0); }) == ErrorCode::DomainError);
    CHECK(code_of([] { g_n_eval(spec_242(), 1.01); }) == ErrorCode::DomainError);
  }

  TEST_CASE("log_a_n examples") {
    CHECK(log_a_n(spec_242()) == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-15));
    CHECK(log_a_n(spec_242()) == doctest::Approx(1.0397208).epsilon(1e-7));
    CHECK(log_a_n(square_chain(1, 3, 3.0)) == 0.0);
    CHECK(log_a_n(square_chain(37, 5, 5.0)) == doctest::Approx(std::log(37.0)).epsilon(1e-15));
  }

  TEST_CASE("property: lambda_k >= 1 and non-increasing in k") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 200; ++trial) {
      const ChainSpec s = random_chain(gen);
      REQUIRE_FALSE(validate(s).has_value());
      for (int k = 1; k <= 12; ++k) {
        CHECK(lambda_k(s, k) >= 1.0);
        CHECK(lambda_k(s, k + 1) <= lambda_k(s, k));
        CHECK(theta_k(s, k) > 0.0);
        CHECK(theta_k(s, k) <= 1.0);
      }
    }
  }

  TEST_CASE("property: F_n monotone, sandwich and F_n = G_n^(lambda_1/gamma)") {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 100; ++trial) {
      const ChainSpec s = random_chain(gen);
      const double l1 = lambda_k(s, 1);
      double prev = f_n_eval(s, 0.0);
      for (int i = 1; i <= 200; ++i) {
        const double x = i / 200.0;
        const double f = f_n_eval(s, x);
        CHECK(f > prev);
        prev = f;
        const double g = g_n_eval(s, x);
        CHECK(-(1.0 - x) >= g);
        CHECK(g >= std::log(x) - 1e-15);
        const double via_g = std::exp(l1 / s.gamma * g);
        CHECK(std::abs(via_g - f) <= 1e-12 * f + 1e-300);
      }
    }
  }

  TEST_CASE("rules and families") {
    CHECK(parse_m_rule("n")(40) == 40);
    CHECK(parse_m_rule("sqrt")(40) == 7);
    CHECK(parse_m_rule("log")(40) == 4);
    CHECK(parse_m_rule("const:9")(40) == 9);
    CHECK(code_of([] { parse_m_rule("const:0"); }) == ErrorCode::BadParameter);
    CHECK(code_of([] { parse_m_rule("cube"); }) == ErrorCode::BadParameter);

    const ChainSpec sq = square_chain(10, 6, 1.0);
    CHECK(parse_gamma_rule("m")(sq) == 6.0);
    CHECK(parse_gamma_rule("2m")(sq) == 12.0);
    CHECK(parse_gamma_rule("m2")(sq) == 36.0);
    CHECK(parse_gamma_rule("one")(sq) == 1.0);
    CHECK(parse_gamma_rule("two")(sq) == 2.0);
    CHECK(parse_gamma_rule("lambda1")(sq) == 6.0);
    CHECK(parse_gamma_rule("const:2.5")(sq) == 2.5);
    CHECK(code_of([] { parse_gamma_rule("const:-1"); }) == ErrorCode::NonPositiveGamma);

    const auto fam = example2_family(2.0, parse_m_rule("n"));
    for (std::int64_t n : {3, 10, 57}) {
      const ChainSpec s = fam.generator(n);
      CHECK_FALSE(validate(s).has_value());
      CHECK(s.m == n);
      CHECK(s.dims[1] == (s.m > 1 ? 2 * n : n));
    }
    const auto sqf = square_family(parse_m_rule("sqrt"), "sqrt");
    CHECK(sqf.generator(100).m == 10);
    CHECK(code_of([] { example2_family(0.5, parse_m_rule("n")); }) == ErrorCode::BadParameter);
  }
}
