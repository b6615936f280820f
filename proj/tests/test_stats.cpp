#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "bdc/rng.hpp"
#include "bdc/stats.hpp"
#include "support/oracles.hpp"

using namespace bdc;
using namespace bdc::stats;

TEST_CASE("worked three-point sample", "[stats]") {
  std::vector<double> d{1.0, 2.0, 3.0};
  auto r = one_sample_t_one_sided(d, 0.0);
  // mean 2, sd 1, t = 2 / (1/sqrt(3)) = 2*sqrt(3)
  CHECK(r.t_statistic == Catch::Approx(2.0 * std::sqrt(3.0)).margin(1e-9));
  CHECK(r.degrees_of_freedom == 2);
  CHECK(r.p_value == Catch::Approx(0.0371).margin(1e-3));
  CHECK(r.p_value == Catch::Approx(oracle::student_t_upper_tail(r.t_statistic, 2)).margin(1e-9));
  CHECK(r.significant);
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("all-zero differences are never significant", "[stats]") {
  std::vector<double> d{0.0, 0.0, 0.0, 0.0};
  auto r = one_sample_t_one_sided(d, 0.0);
  CHECK(r.p_value == 1.0);
  CHECK_FALSE(r.significant);
  CHECK(r.degenerate);
}

TEST_CASE("zero-variance samples collapse by the sign of the mean", "[stats]") {
  std::vector<double> up{0.2, 0.2, 0.2};
  auto r = one_sample_t_one_sided(up, 0.0);
  CHECK(r.p_value == 0.0);
  CHECK(r.degenerate);
  CHECK(r.significant);
  CHECK(std::isinf(r.t_statistic));

  std::vector<double> down{-0.2, -0.2, -0.2};
  auto r2 = one_sample_t_one_sided(down, 0.0);
  CHECK(r2.p_value == 1.0);
  CHECK(r2.degenerate);
  CHECK_FALSE(r2.significant);
}

TEST_CASE("paired test is the one-sample test on differences", "[stats]") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 2 + rng.next_below(12);
    PairedSample s;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      s.labels.push_back("m" + std::to_string(i));
      s.a.push_back(rng.next_double());
      s.b.push_back(rng.next_double());
      d[i] = s.a[i] - s.b[i];
    }
    auto pr = paired_t_one_sided(s);
    auto or_ = one_sample_t_one_sided(d, 0.0);
    CHECK(pr.t_statistic == or_.t_statistic);
    CHECK(pr.p_value == or_.p_value);
    CHECK(pr.degrees_of_freedom == or_.degrees_of_freedom);
  }
}

TEST_CASE("paired sample validation", "[stats]") {
  PairedSample bad_len{{"a", "b"}, {1.0, 2.0}, {1.0}};
  CHECK_THROWS_AS(paired_t_one_sided(bad_len), LengthMismatch);
  PairedSample one{{"a"}, {1.0}, {0.0}};
  CHECK_THROWS_AS(paired_t_one_sided(one), TooFewPairs);
  PairedSample dup{{"a", "a"}, {1.0, 2.0}, {0.0, 0.0}};
  CHECK_THROWS_AS(paired_t_one_sided(dup), Error);
}

TEST_CASE("p-values match quadrature and permutation oracles", "[stats]") {
  Rng rng(29);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> d(10);
    for (auto& v : d) v = 2.0 * rng.next_double() - 0.7;
    auto r = one_sample_t_one_sided(d, 0.0);
    if (r.degenerate) continue;
    CHECK(r.p_value ==
          Catch::Approx(oracle::student_t_upper_tail(r.t_statistic, 9)).margin(1e-6));
    // the t approximation tracks the exact sign-permutation distribution
    CHECK(r.p_value == Catch::Approx(oracle::sign_permutation_p(d)).margin(0.02));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("one-sided p respects direction", "[stats]") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 3 + rng.next_below(10);
    std::vector<double> d(n), neg(n);
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = rng.next_double() - 0.3;
      neg[i] = -d[i];
    }
    auto r1 = one_sample_t_one_sided(d, 0.0);
    if (r1.degenerate) continue;
    auto r2 = one_sample_t_one_sided(neg, 0.0);
    CHECK(r1.p_value + r2.p_value == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("larger mean shifts give smaller p", "[stats]") {
  std::vector<double> base{0.01, -0.02, 0.03, 0.0, 0.015};
  double last = 1.0;
  for (double shift : {0.0, 0.02, 0.05, 0.1, 0.3}) {
    std::vector<double> d = base;
    for (auto& v : d) v += shift;
    auto r = one_sample_t_one_sided(d, 0.0);
    CHECK(r.p_value <= last + 1e-15);
    last = r.p_value;
  }
}

TEST_CASE("incomplete beta sanity", "[stats]") {
  CHECK(regularized_incomplete_beta(2.5, 0.5, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2.5, 0.5, 1.0) == 1.0);
  // I_x(1, 1) is the identity
  for (double x : {0.1, 0.5, 0.9})
    CHECK(regularized_incomplete_beta(1.0, 1.0, x) == Catch::Approx(x).margin(1e-12));
  // symmetry identity I_x(a,b) = 1 - I_{1-x}(b,a)
  Rng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    double a = 0.5 + 5.0 * rng.next_double();
    double b = 0.5 + 5.0 * rng.next_double();
    double x = rng.next_double();
    CHECK(regularized_incomplete_beta(a, b, x) ==
          Catch::Approx(1.0 - regularized_incomplete_beta(b, a, 1.0 - x)).margin(1e-10));
  }
}

TEST_CASE("t upper tail closed form for two degrees of freedom", "[stats]") {
  // F(t) = 1/2 + t / (2*sqrt(2 + t^2)) for df = 2
  for (double t : {-3.0, -1.0, 0.0, 0.5, 2.0, 3.4641016151377544}) {
    double expected = 1.0 - (0.5 + t / (2.0 * std::sqrt(2.0 + t * t)));
    CHECK(student_t_upper_tail(t, 2) == Catch::Approx(expected).margin(1e-12));
  }
}

TEST_CASE("alpha is honored", "[stats]") {
  std::vector<double> d{1.0, 2.0, 3.0};  // p ~ 0.0371
  CHECK(one_sample_t_one_sided(d, 0.0, 0.05).significant);
  CHECK_FALSE(one_sample_t_one_sided(d, 0.0, 0.01).significant);
}
