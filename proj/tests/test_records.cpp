#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "bdc/records.hpp"
#include "bdc/rng.hpp"
#include "support/builders.hpp"

using namespace bdc;
using namespace bdc::records;

TEST_CASE("vector record line format is frozen", "[records]") {
  EvaluationVector v("m1", "b1", Scenario::Mitigated, ContaminationType::Mild, {"q1"}, {1.0});
  std::ostringstream os;
  write_vector(os, v);
  CHECK(os.str() ==
        "{\"benchmark_id\":\"b1\",\"contamination_type\":\"mild\",\"model_id\":\"m1\","
        "\"question_id\":\"q1\",\"scenario\":\"mitigated\",\"score\":1}\n");

  EvaluationVector clean("m1", "b1", Scenario::Clean, std::nullopt, {"q1"}, {0.0});
  std::ostringstream os2;
  write_vector(os2, clean);
  CHECK(os2.str() ==
        "{\"benchmark_id\":\"b1\",\"model_id\":\"m1\",\"question_id\":\"q1\","
        "\"scenario\":\"clean\",\"score\":0}\n");

  EvaluationVector cont("m1", "b1", Scenario::Clean, std::nullopt, {"q1", "q2"}, {0.5, 1.0});
  std::ostringstream os3;
  write_vector(os3, cont);
  CHECK(os3.str() ==
        "{\"benchmark_id\":\"b1\",\"model_id\":\"m1\",\"question_id\":\"q1\","
        "\"scenario\":\"clean\",\"score\":0.5}\n"
        "{\"benchmark_id\":\"b1\",\"model_id\":\"m1\",\"question_id\":\"q2\","
        "\"scenario\":\"clean\",\"score\":1}\n");
}

TEST_CASE("vectors survive a write/read round trip", "[records]") {
  Rng rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + rng.next_below(40);
    auto entries = testutil::random_binary_entries(rng, n);
    auto scen = trial % 3 == 0   ? Scenario::Clean
                : trial % 3 == 1 ? Scenario::Contaminated
                                 : Scenario::Mitigated;
    std::optional<ContaminationType> ct;
    if (scen != Scenario::Clean)
      ct = trial % 2 ? ContaminationType::Mild : ContaminationType::Intensive;
    EvaluationVector v("model-" + std::to_string(trial), "bench+S3", scen, ct,
                       testutil::ids(n), entries);
    std::ostringstream os;
    write_vector(os, v);
    std::istringstream is(os.str());
    auto back = read_vectors(is);
    REQUIRE(back.size() == 1);
    CHECK(back[0].model_id() == v.model_id());
    CHECK(back[0].benchmark_id() == v.benchmark_id());
    CHECK(back[0].scenario() == v.scenario());
    CHECK(back[0].contamination_type() == v.contamination_type());
    CHECK(back[0].question_ids() == v.question_ids());
    CHECK(back[0].entries() == v.entries());
  }
}

TEST_CASE("reader groups interleaved runs and keeps record order", "[records]") {
  EvaluationVector a("m1", "b1", Scenario::Clean, std::nullopt, {"q0", "q1"}, {1, 0});
  EvaluationVector b("m2", "b1", Scenario::Clean, std::nullopt, {"q0", "q1"}, {0, 1});
  std::ostringstream oa, ob;
  write_vector(oa, a);
  write_vector(ob, b);
  // interleave the two files line by line
  std::istringstream la(oa.str()), lb(ob.str());
  std::string l1, l2, mixed;
  while (std::getline(la, l1) && std::getline(lb, l2)) mixed += l1 + "\n" + l2 + "\n";
  std::istringstream is(mixed);
  auto back = read_vectors(is);
  REQUIRE(back.size() == 2);
  CHECK(back[0].model_id() == "m1");
  CHECK(back[1].model_id() == "m2");
  CHECK(back[0].entries() == std::vector<double>{1, 0});
  CHECK(back[1].entries() == std::vector<double>{0, 1});
}

TEST_CASE("reader rejects malformed input", "[records]") {
  auto read = [](const std::string& text) {
    std::istringstream is(text);
    return read_vectors(is);
  };
  CHECK_THROWS_AS(read("not json\n"), FormatError);
  CHECK_THROWS_AS(read("[1,2]\n"), FormatError);
  CHECK_THROWS_AS(read("{\"model_id\":\"m\"}\n"), FormatError);
  CHECK_THROWS_AS(
      read("{\"benchmark_id\":\"b\",\"model_id\":\"m\",\"question_id\":\"q\","
           "\"scenario\":\"weird\",\"score\":1}\n"),
      FormatError);
  // duplicate question id within one run
  std::string dup =
      "{\"benchmark_id\":\"b\",\"model_id\":\"m\",\"question_id\":\"q\",\"scenario\":\"clean\",\"score\":1}\n";
  CHECK_THROWS_AS(read(dup + dup), Error);
}

TEST_CASE("logprob, generation, verdict, score and audit records round trip", "[records]") {
  std::vector<LogprobRecord> lps{{"q1", 0, -1.25}, {"q1", 1, -0.5}, {"q2", 0, -3.0}};
  std::ostringstream os;
  write_logprobs(os, lps);
  std::istringstream is(os.str());
  auto lps2 = read_logprobs(is);
  REQUIRE(lps2.size() == 3);
  CHECK(lps2[1].token_index == 1);
  CHECK(lps2[1].logprob == -0.5);

  std::vector<GenerationRecord> gens{{"q1", "line one\nline two"}};
  std::ostringstream og;
  write_generations(og, gens);
  std::istringstream ig(og.str());
  auto gens2 = read_generations(ig);
  REQUIRE(gens2.size() == 1);
  CHECK(gens2[0].text == "line one\nline two");

  std::vector<VerdictRecord> vs{{"min_k", "arc_c", "m1", -7.97, -8.72, true}};
  std::ostringstream ov;
  write_verdicts(ov, vs);
  std::istringstream iv(ov.str());
  auto vs2 = read_verdicts(iv);
  REQUIRE(vs2.size() == 1);
  CHECK(vs2[0].contaminated);
  CHECK(vs2[0].score == -7.97);

  std::vector<ScoreRecord> ss{{"m1", "mmlu", "ts_guessing", 0.41, 0.4}};
  std::ostringstream osr;
  write_scores(osr, ss);
  std::istringstream isr(osr.str());
  auto ss2 = read_scores(isr);
  REQUIRE(ss2.size() == 1);
  CHECK(ss2[0].method == "ts_guessing");

  std::vector<AuditRecord> as{{"q1", "deadbeef", "{\"generation\":\"#### 42\"}", 1.0}};
  std::ostringstream oa;
  write_audits(oa, as);
  std::istringstream ia(oa.str());
  auto as2 = read_audits(ia);
  REQUIRE(as2.size() == 1);
  CHECK(as2[0].raw_response == "{\"generation\":\"#### 42\"}");
  CHECK(as2[0].score == 1.0);
}

TEST_CASE("metric records carry undefined values as null", "[records]") {
  std::vector<MetricRecord> ms;
  ms.push_back({"m1", "b1", "S3", ContaminationType::Intensive, "binary", 100, 0.95, 0.875});
  ms.push_back({"m1", "b1", "S4", std::nullopt, "continuous", 50, std::nullopt, 0.2});
  std::ostringstream os;
  write_metrics(os, ms);
  std::string text = os.str();
  CHECK(text.find("\"fidelity\":null") != std::string::npos);
  std::istringstream is(text);
  auto back = read_metrics(is);
  REQUIRE(back.size() == 2);
  CHECK(back[0].fidelity.value() == 0.95);
  CHECK(back[0].contamination_type == ContaminationType::Intensive);
  CHECK_FALSE(back[1].fidelity.has_value());
  CHECK(back[1].resistance.value() == 0.2);
  CHECK_FALSE(back[1].contamination_type.has_value());
}

TEST_CASE("benchmark item records", "[records]") {
  Benchmark b;
  b.benchmark_id = "demo";
  BenchmarkItem mc;
  mc.question_id = "s1";
  mc.question = "Q?";
  mc.question_type = QuestionType::MultipleChoice;
  mc.choices = {"a", "b"};
  mc.answer_index = 0;
  b.items.push_back(mc);
  BenchmarkItem oe;
  oe.question_id = "s2";
  oe.question = "How many?";
  oe.question_type = QuestionType::OpenEnded;
  oe.answer_text = "240";
  oe.origin_id = "orig2";
  oe.applied_strategies = {"S3", "S4"};
  b.items.push_back(oe);

  std::ostringstream os;
  write_benchmark(os, b);
  std::string first_line = os.str().substr(0, os.str().find('\n'));
  CHECK(first_line ==
        "{\"answer\":0,\"applied_strategies\":[],\"choices\":[\"a\",\"b\"],"
        "\"question\":\"Q?\",\"question_id\":\"s1\",\"question_type\":\"multiple_choice\"}");

  std::istringstream is(os.str());
  auto back = read_benchmark(is, "demo");
  REQUIRE(back.items.size() == 2);
  CHECK(back.items[0].choices == std::vector<std::string>{"a", "b"});
  CHECK(back.items[0].answer_index == 0);
  CHECK(back.items[1].answer_text == "240");
  CHECK(back.items[1].origin_id.value() == "orig2");
  CHECK(back.items[1].applied_strategies == std::vector<std::string>{"S3", "S4"});

  // validation runs on read
  std::istringstream bad(
      "{\"answer\":5,\"choices\":[\"a\",\"b\"],\"question\":\"Q?\","
      "\"question_id\":\"s1\",\"question_type\":\"multiple_choice\"}\n");
  CHECK_THROWS_AS(read_benchmark(bad, "demo"), FormatError);
}

TEST_CASE("benchmark validation", "[records]") {
  Benchmark b;
  b.benchmark_id = "x";
  CHECK_THROWS_AS(b.validate(), EmptyInput);
  BenchmarkItem it;
  it.question_id = "q1";
  it.question = "text";
  it.question_type = QuestionType::OpenEnded;
  it.answer_text = "a";
  b.items = {it, it};
  CHECK_THROWS_AS(b.validate(), FormatError);  // duplicate ids
  b.items.pop_back();
  CHECK_NOTHROW(b.validate());
  b.items[0].choices = {"a", "b"};
  CHECK_THROWS_AS(b.validate(), FormatError);  // open-ended with choices
}
