#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bdc/eval_vector.hpp"
#include "bdc/rng.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace bdc;
using testutil::ids;
using testutil::vec;

TEST_CASE("vector construction validates its inputs", "[eval]") {
  CHECK_THROWS_AS(vec({}), EmptyInput);
  CHECK_THROWS_AS(EvaluationVector("m", "b", Scenario::Clean, std::nullopt, ids(3), {1.0, 0.0}),
                  LengthMismatch);
  CHECK_THROWS_AS(
      EvaluationVector("m", "b", Scenario::Clean, std::nullopt, {"a", "a"}, {1.0, 0.0}), Error);
  CHECK_THROWS_AS(vec({0.5, 1.2}), Error);
  CHECK_THROWS_AS(vec({-0.1, 0.2}), Error);
}

TEST_CASE("score mode is derived from the entries", "[eval]") {
  CHECK(vec({0.0, 1.0, 1.0}).mode() == ScoreMode::Binary);
  CHECK(vec({0.0, 0.5, 1.0}).mode() == ScoreMode::Continuous);
}

TEST_CASE("normalized Hamming distance on worked examples", "[eval]") {
  CHECK(normalized_hamming(vec({1, 0, 1, 1}), vec({1, 0, 1, 1})) == 0.0);
  CHECK(normalized_hamming(vec({1, 0, 1, 1}), vec({1, 1, 0, 1})) == 0.5);
  CHECK(normalized_hamming(vec({1, 1, 0, 0, 0}), vec({0, 0, 0, 1, 1})) == 0.8);
}

TEST_CASE("normalized Hamming rejects bad pairings", "[eval]") {
  CHECK_THROWS_AS(normalized_hamming(vec({1, 0}), vec({1, 0, 1})), LengthMismatch);
  CHECK_THROWS_AS(normalized_hamming(vec({1, 0.5}), vec({1, 0})), NonBinaryInput);
  auto other_ids = vec({1.0, 0.0}, Scenario::Clean, "m1", "b1", std::nullopt, "r");
  CHECK_THROWS_AS(normalized_hamming(vec({1, 0}), other_ids), MisalignedQuestions);
}

TEST_CASE("alignment is by question id, not position", "[eval]") {
  EvaluationVector x("m", "b", Scenario::Clean, std::nullopt, {"a", "b", "c"}, {1, 0, 1});
  EvaluationVector y("m", "b", Scenario::Clean, std::nullopt, {"c", "a", "b"}, {1, 1, 0});
  // same per-question scores, shuffled on disk order
  CHECK(normalized_hamming(x, y) == 0.0);
}

TEST_CASE("Hamming distance matches a brute-force counter on random pairs", "[eval]") {
  Rng rng(41);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 1 + static_cast<std::size_t>(rng.next_below(256));
    auto a = testutil::random_binary_entries(rng, n);
    auto b = testutil::random_binary_entries(rng, n);
    double expected =
        static_cast<double>(oracle::mismatch_count(a, b)) / static_cast<double>(n);
    CHECK(normalized_hamming(vec(a), vec(b)) == expected);
  }
}

TEST_CASE("Hamming distance is a metric on binary vectors", "[eval]") {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + static_cast<std::size_t>(rng.next_below(64));
    auto a = vec(testutil::random_binary_entries(rng, n));
    auto b = vec(testutil::random_binary_entries(rng, n));
    auto c = vec(testutil::random_binary_entries(rng, n));
    CHECK(normalized_hamming(a, b) == normalized_hamming(b, a));
    CHECK(normalized_hamming(a, a) == 0.0);
    CHECK(normalized_hamming(a, c) <=
          normalized_hamming(a, b) + normalized_hamming(b, c) + 1e-12);
  }
}

static ScenarioTriple make_triple(EvaluationVector orig, EvaluationVector upd,
                                  EvaluationVector cont, std::string strategy = "S1") {
  return ScenarioTriple(std::move(orig), std::move(upd), std::move(cont), std::move(strategy));
}

TEST_CASE("identical clean runs give fidelity exactly 1", "[eval][metrics]") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 1 + static_cast<std::size_t>(rng.next_below(128));
    auto e = testutil::random_binary_entries(rng, n);
    auto t = make_triple(vec(e), vec(e), vec(e, Scenario::Mitigated), "vanilla");
    CHECK(fidelity(t) == 1.0);
    CHECK(resistance(t) == 1.0);
  }
}

TEST_CASE("equal accuracy can hide full disagreement", "[eval][metrics]") {
  // Both runs score 2 of 5, yet they agree on only one question.
  auto orig = vec({1, 1, 0, 0, 0});
  auto upd = vec({0, 0, 0, 1, 1});
  CHECK(accuracy(orig) == Catch::Approx(0.400).margin(1e-12));
  CHECK(accuracy(upd) == Catch::Approx(0.400).margin(1e-12));
  auto t = make_triple(orig, upd, vec({0, 0, 0, 1, 1}, Scenario::Mitigated));
  CHECK(fidelity(t) == Catch::Approx(0.200).margin(1e-12));
}

TEST_CASE("fully complementary runs give fidelity 0", "[eval][metrics]") {
  auto t = make_triple(vec({1, 1, 0, 0}), vec({0, 0, 1, 1}),
                       vec({0, 0, 1, 1}, Scenario::Mitigated));
  CHECK(fidelity(t) == 0.0);
}

TEST_CASE("triple construction realigns shuffled vectors", "[eval]") {
  EvaluationVector orig("m", "b", Scenario::Clean, std::nullopt, {"a", "b", "c", "d"},
                        {1, 0, 1, 0});
  EvaluationVector upd("m", "b+S3", Scenario::Clean, std::nullopt, {"d", "c", "b", "a"},
                       {0, 1, 0, 1});
  EvaluationVector cont("m", "b+S3", Scenario::Mitigated, ContaminationType::Mild,
                        {"b", "a", "d", "c"}, {0, 1, 0, 1});
  ScenarioTriple t(orig, upd, cont, "S3");
  CHECK(fidelity(t) == 1.0);
  CHECK(resistance(t) == 1.0);
  CHECK(t.clean_on_updated().question_ids() == orig.question_ids());
}

TEST_CASE("triple rejects mislabeled scenarios", "[eval]") {
  auto clean = vec({1, 0});
  CHECK_THROWS_AS(make_triple(vec({1, 0}, Scenario::Contaminated), clean,
                              vec({1, 0}, Scenario::Mitigated)),
                  Error);
  CHECK_THROWS_AS(make_triple(clean, clean, vec({1, 0}, Scenario::Clean)), Error);
  // both contaminated and mitigated labels are accepted for the third run
  CHECK_NOTHROW(make_triple(clean, clean, vec({1, 0}, Scenario::Contaminated)));
  CHECK_NOTHROW(make_triple(clean, clean, vec({1, 0}, Scenario::Mitigated)));
}

TEST_CASE("compute_metrics dispatches on score mode", "[eval][metrics]") {
  SECTION("binary") {
    auto t = make_triple(vec({1, 1, 0, 0}), vec({1, 0, 0, 0}),
                         vec({1, 0, 0, 1}, Scenario::Mitigated));
    auto m = compute_metrics(t);
    CHECK(m.mode == ScoreMode::Binary);
    CHECK(m.n == 4);
    CHECK(m.fidelity.value() == 0.75);
    CHECK(m.resistance.value() == 0.75);
  }
  SECTION("continuous uses Pearson") {
    auto t = make_triple(vec({0.1, 0.5, 0.9}), vec({0.2, 0.4, 0.9}),
                         vec({0.15, 0.5, 0.8}, Scenario::Mitigated));
    auto m = compute_metrics(t);
    CHECK(m.mode == ScoreMode::Continuous);
    std::vector<double> a{0.1, 0.5, 0.9}, b{0.2, 0.4, 0.9};
    CHECK(m.fidelity.value() == Catch::Approx(oracle::pearson(a, b)).margin(1e-12));
  }
  SECTION("zero variance leaves the metric undefined") {
    auto t = make_triple(vec({0.5, 0.5, 0.5}), vec({0.2, 0.4, 0.9}),
                         vec({0.2, 0.4, 0.9}, Scenario::Mitigated));
    auto m = compute_metrics(t);
    CHECK_FALSE(m.fidelity.has_value());
    CHECK(m.resistance.has_value());
  }
  SECTION("mixed modes are rejected") {
    auto t = make_triple(vec({1, 0, 1}), vec({0.2, 0.4, 0.9}),
                         vec({0.2, 0.4, 0.9}, Scenario::Mitigated));
    CHECK_THROWS_AS(compute_metrics(t), MixedScoreModes);
  }
}

TEST_CASE("pearson agrees with the textbook formula", "[eval]") {
  auto x = vec({0.1, 0.5, 0.9});
  auto y = vec({0.2, 0.4, 0.9});
  std::vector<double> xe{0.1, 0.5, 0.9}, ye{0.2, 0.4, 0.9};
  CHECK(pearson(x, y).value() == Catch::Approx(oracle::pearson(xe, ye)).margin(1e-12));
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 3 + static_cast<std::size_t>(rng.next_below(40));
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.next_double();
      b[i] = rng.next_double();
    }
    CHECK(pearson(vec(a), vec(b)).value() == Catch::Approx(oracle::pearson(a, b)).margin(1e-9));
  }
}

TEST_CASE("pearson edge cases", "[eval]") {
  CHECK(pearson(vec({0.1, 0.5, 0.9}), vec({0.1, 0.5, 0.9})).value() ==
        Catch::Approx(1.0).margin(1e-12));
  CHECK_FALSE(pearson(vec({0.5, 0.5, 0.5}), vec({0.1, 0.5, 0.9})).has_value());
  CHECK_THROWS_AS(pearson(vec({0.5}), vec({0.1})), TooFewPairs);
  // invariant under a positive affine rescaling of one side
  auto x = vec({0.1, 0.4, 0.8, 0.3});
  auto y = vec({0.2, 0.9, 0.5, 0.4});
  auto y2 = vec({0.35, 0.7, 0.5, 0.45});  // 0.5*y + 0.25
  CHECK(pearson(x, y).value() == Catch::Approx(pearson(x, y2).value()).margin(1e-12));
}

TEST_CASE("accuracy and inflation", "[eval][metrics]") {
  CHECK(accuracy(vec({1, 1, 0, 0, 0})) == Catch::Approx(0.4).margin(1e-12));
  CHECK(accuracy(vec({0, 0, 0})) == 0.0);
  CHECK_THROWS_AS(accuracy(vec({0.4, 0.6})), NonBinaryInput);

  auto clean = vec({1, 0, 1, 0});
  CHECK(accuracy_inflation(clean, vec({1, 0, 1, 0}, Scenario::Contaminated)) == 0.0);

  std::vector<double> c(1000, 0.0), k(1000, 0.0);
  for (std::size_t i = 0; i < 500; ++i) c[i] = 1.0;
  for (std::size_t i = 0; i < 553; ++i) k[i] = 1.0;
  CHECK(accuracy_inflation(vec(c), vec(k, Scenario::Contaminated)) ==
        Catch::Approx(5.3).margin(1e-9));

  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + static_cast<std::size_t>(rng.next_below(100));
    auto a = testutil::random_binary_entries(rng, n);
    auto b = testutil::random_binary_entries(rng, n);
    double ca = 0, cb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ca += a[i];
      cb += b[i];
    }
    double expected = 100.0 * (cb / static_cast<double>(n) - ca / static_cast<double>(n));
    CHECK(accuracy_inflation(vec(a), vec(b, Scenario::Contaminated)) ==
          Catch::Approx(expected).margin(1e-12));
  }
}

TEST_CASE("retained correctness", "[eval][metrics]") {
  // clean right on q0,q1; other right on q1,q2 -> keeps 1 of 2
  auto clean = vec({1, 1, 0});
  auto other = vec({0, 1, 1}, Scenario::Mitigated);
  CHECK(retained_correctness(clean, other) == 0.5);
  CHECK(retained_correctness(clean, vec({1, 1, 1}, Scenario::Mitigated)) == 1.0);
  CHECK_THROWS_AS(retained_correctness(vec({0, 0, 0}), other), NoCorrectBaseline);
}

TEST_CASE("perplexity", "[eval]") {
  double l2 = -std::log(2.0);
  CHECK(perplexity(std::vector<double>{l2, l2, l2, l2}) == Catch::Approx(2.0).margin(1e-12));
  CHECK(perplexity(std::vector<double>{0.0, 0.0}) == Catch::Approx(1.0).margin(1e-12));
  CHECK_THROWS_AS(perplexity(std::vector<double>{}), EmptyInput);
  CHECK_THROWS_AS(perplexity(std::vector<double>{-1.0, 0.1}), PositiveLogprob);
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 1 + static_cast<std::size_t>(rng.next_below(30));
    std::vector<double> lp(n);
    double s = 0;
    for (auto& v : lp) {
      v = -5.0 * rng.next_double();
      s += v;
    }
    CHECK(perplexity(lp) ==
          Catch::Approx(std::exp(-s / static_cast<double>(n))).margin(1e-9));
  }
}
