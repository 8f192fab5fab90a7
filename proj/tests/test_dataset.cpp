#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"

#include "simdsl/dataset.hpp"
#include "simdsl/parser.hpp"
#include "simdsl/synthetic.hpp"
#include "support/program_gen.hpp"

using namespace simdsl;

namespace {

nlohmann::json valid_line() {
  return nlohmann::json{
      {"id", "ex-1"},
      {"version", "v1"},
      {"split", "train"},
      {"context", "A flask holds 4 grams and loses 1 gram per wash over 2 washes."},
      {"question", "How many grams remain?"},
      {"answer", 2.0},
      {"options", {2.0, 3.0, 4.0, 5.0}},
      {"program",
       "func simulation() { g = 4; repeat(2) { g = g - 1; } return g; }"}};
}

LoadResult load_lines(const std::vector<std::string>& lines) {
  std::string joined;
  for (const std::string& line : lines) {
    joined += line;
    joined += '\n';
  }
  std::istringstream in(joined);
  return load_dataset_stream(in);
}

}  // namespace

TEST_CASE("load accepts a valid example and reports counts") {
  LoadResult result = load_lines({valid_line().dump()});
  CHECK(result.report.loaded == 1);
  CHECK(result.report.quarantined.empty());
  REQUIRE(result.examples.size() == 1);
  const QAExample& example = result.examples[0];
  CHECK(example.id == "ex-1");
  CHECK(example.version == DatasetVersion::V1);
  CHECK(example.split == Split::Train);
  CHECK(example.gold_answer == 2.0);
  CHECK(result.report.by_version["v1"]["train"] == 1);
}

TEST_CASE("load quarantines an answer mismatch with the reason") {
  nlohmann::json line = valid_line();
  line["answer"] = 10.0;
  line["options"] = {10.0, 3.0, 4.0, 5.0};
  LoadResult result = load_lines({line.dump()});
  CHECK(result.report.loaded == 0);
  REQUIRE(result.report.quarantined.size() == 1);
  CHECK(result.report.quarantined[0].line == 1);
  CHECK(result.report.quarantined[0].reason.find("gold answer") != std::string::npos);
}

TEST_CASE("load quarantines structural problems line by line") {
  nlohmann::json missing = valid_line();
  missing.erase("program");
  nlohmann::json bad_version = valid_line();
  bad_version["version"] = "v3";
  nlohmann::json few_options = valid_line();
  few_options["options"] = {2.0, 3.0, 4.0};
  nlohmann::json dup_options = valid_line();
  dup_options["options"] = {2.0, 2.0, 4.0, 5.0};
  nlohmann::json gold_missing = valid_line();
  gold_missing["options"] = {9.0, 3.0, 4.0, 5.0};
  nlohmann::json no_parse = valid_line();
  no_parse["program"] = "func simulation() { repeat(n) { x = 1; } }";
  nlohmann::json faults = valid_line();
  faults["program"] = "func simulation() { g = 1 / 0; return g; }";
  nlohmann::json no_return = valid_line();
  no_return["program"] = "func simulation() { g = 2; }";

  LoadResult result = load_lines({
      "this is not json",
      missing.dump(),
      bad_version.dump(),
      few_options.dump(),
      dup_options.dump(),
      gold_missing.dump(),
      no_parse.dump(),
      faults.dump(),
      no_return.dump(),
      valid_line().dump(),
  });
  CHECK(result.report.loaded == 1);
  REQUIRE(result.report.quarantined.size() == 9);
  CHECK(result.report.quarantined[0].reason.find("invalid JSON") != std::string::npos);
  CHECK(result.report.quarantined[1].reason.find("program") != std::string::npos);
  CHECK(result.report.quarantined[2].reason.find("version") != std::string::npos);
  CHECK(result.report.quarantined[3].reason.find("options") != std::string::npos);
  CHECK(result.report.quarantined[4].reason.find("distinct") != std::string::npos);
  CHECK(result.report.quarantined[5].reason.find("gold answer missing") !=
        std::string::npos);
  CHECK(result.report.quarantined[6].reason.find("parse") != std::string::npos);
  CHECK(result.report.quarantined[7].reason.find("runtime") != std::string::npos);
  CHECK(result.report.quarantined[8].reason.find("return") != std::string::npos);

  nlohmann::json report = result.report.to_json();
  CHECK(report["loaded"] == 1);
  CHECK(report["quarantined"].size() == 9);
  CHECK(report["quarantined"][0]["line"] == 1);
  CHECK(report.contains("by_version"));
}

TEST_CASE("empty lines are skipped, not quarantined") {
  LoadResult result = load_lines({"", valid_line().dump(), ""});
  CHECK(result.report.loaded == 1);
  CHECK(result.report.quarantined.empty());
}

TEST_CASE("example_to_json round-trips through the loader") {
  LoadResult first = load_lines({valid_line().dump()});
  REQUIRE(first.examples.size() == 1);
  std::string dumped = example_to_json(first.examples[0]).dump();
  LoadResult second = load_lines({dumped});
  REQUIRE(second.examples.size() == 1);
  CHECK(second.examples[0].id == first.examples[0].id);
  CHECK(second.examples[0].gold_answer == first.examples[0].gold_answer);
  CHECK(second.examples[0].reference_program == first.examples[0].reference_program);
  CHECK(second.examples[0].options == first.examples[0].options);
}

TEST_CASE("distractors: frozen values for seeded calls") {
  auto d16 = generate_distractors(16.0, 7);
  CHECK(d16[0] == 18.0);
  CHECK(d16[1] == 20.0);
  CHECK(d16[2] == 12.0);

  auto d0 = generate_distractors(0.0, 3);
  CHECK(d0[0] == -1.0);
  CHECK(d0[1] == 1.0);
  CHECK(d0[2] == doctest::Approx(-0.6).epsilon(1e-12));
}

TEST_CASE("distractors: in range, distinct, never the gold, deterministic") {
  std::mt19937_64 seeds(100);
  for (int i = 0; i < 200; ++i) {
    double gold;
    switch (i % 4) {
      case 0: gold = 16.0; break;
      case 1: gold = 0.0; break;
      case 2: gold = -7.25; break;
      default: gold = 3.0 + i; break;
    }
    std::uint64_t seed = seeds();
    auto d = generate_distractors(gold, seed);
    double delta = std::abs(gold) >= 1.0 ? 0.3 * std::abs(gold) : 1.0;
    for (double value : d) {
      CHECK(value != gold);
      CHECK(value >= gold - delta);
      CHECK(value <= gold + delta);
    }
    CHECK(d[0] != d[1]);
    CHECK(d[0] != d[2]);
    CHECK(d[1] != d[2]);

    auto again = generate_distractors(gold, seed);
    CHECK(d == again);
  }

  // gold 16: integer display precision keeps integer distractors
  auto d = generate_distractors(16.0, 7);
  for (double value : d) {
    CHECK(value == std::floor(value));
    CHECK(value >= 11.2);
    CHECK(value <= 20.8);
  }
}

TEST_CASE("classify_complexity on the three strata") {
  // 1 if, 1 repeat(8) with 2 assigns inside, 1 init: 17 dynamic changes
  ParseResult complex_prog = parse_source(
      "func simulation() { x = 0; repeat(8) { x = x + 1; y = x * 2; } "
      "if(x < 0) { z = 1; } return x; }");
  REQUIRE(complex_prog.ok());
  ComplexityLabel complex_label = classify_complexity(*complex_prog.program);
  CHECK(complex_label.label == Complexity::Complex);
  CHECK(complex_label.if_branches == 1);
  CHECK(complex_label.loop_branches == 1);
  CHECK(complex_label.state_changes == 17);

  ParseResult simple_prog = parse_source("func simulation() { return 5; }");
  REQUIRE(simple_prog.ok());
  ComplexityLabel simple_label = classify_complexity(*simple_prog.program);
  CHECK(simple_label.label == Complexity::Simple);
  CHECK(simple_label.if_branches == 0);
  CHECK(simple_label.loop_branches == 0);
  CHECK(simple_label.state_changes == 0);

  // loop present but too few changes for complex, loops forbid simple
  ParseResult other_prog = parse_source(
      "func simulation() { repeat(2) { x = 1; } return x; }");
  REQUIRE(other_prog.ok());
  ComplexityLabel other_label = classify_complexity(*other_prog.program);
  CHECK(other_label.label == Complexity::Other);
  CHECK(other_label.state_changes == 2);
}

TEST_CASE("classify_complexity boundary cases") {
  // if+loop with exactly 15 changes is not complex
  ParseResult fifteen = parse_source(
      "func simulation() { x = 0; repeat(7) { x = x + 1; y = x; } "
      "if(x < 0) { z = 1; } return x; }");
  REQUIRE(fifteen.ok());
  ComplexityLabel fifteen_label = classify_complexity(*fifteen.program);
  CHECK(fifteen_label.state_changes == 15);
  CHECK(fifteen_label.label == Complexity::Other);

  // five straight-line changes stay simple; six do not
  ParseResult five = parse_source(
      "func simulation() { a = 1; b = 2; c = 3; d = 4; e = 5; return a; }");
  REQUIRE(five.ok());
  CHECK(classify_complexity(*five.program).label == Complexity::Simple);

  ParseResult six = parse_source(
      "func simulation() { a = 1; b = 2; c = 3; d = 4; e = 5; f = 6; return a; }");
  REQUIRE(six.ok());
  CHECK(classify_complexity(*six.program).label == Complexity::Other);

  // two ifs disqualify simple even without loops
  ParseResult two_ifs = parse_source(
      "func simulation() { a = 1; if(a > 0) { b = 1; } if(a < 5) { c = 1; } "
      "return a; }");
  REQUIRE(two_ifs.ok());
  CHECK(classify_complexity(*two_ifs.program).label == Complexity::Other);
}

TEST_CASE("complex and simple are mutually exclusive on random programs") {
  std::mt19937_64 rng(505050);
  simdsl::testsupport::GenOptions options;
  options.max_repeat_count = 9;
  for (int i = 0; i < 500; ++i) {
    Program program = simdsl::testsupport::generate_program(rng, options);
    ComplexityLabel label = classify_complexity(program);
    bool is_complex = label.if_branches >= 1 && label.loop_branches >= 1 &&
                      label.state_changes > 15;
    bool is_simple = label.if_branches <= 1 && label.loop_branches == 0 &&
                     label.state_changes <= 5;
    CHECK_FALSE((is_complex && is_simple));
    CHECK(label.label == (is_complex ? Complexity::Complex
                                     : is_simple ? Complexity::Simple
                                                 : Complexity::Other));
  }
}

TEST_CASE("classify_complexity works from a QAExample") {
  std::vector<QAExample> corpus = generate_synthetic_corpus(3, Split::Train, 2);
  for (const QAExample& example : corpus) {
    ComplexityLabel label = classify_complexity(example);
    CHECK(label.loop_branches == 1);
    CHECK(label.if_branches == 0);
    // init + one change per cycle
    CHECK(label.state_changes >= 4);
    CHECK(label.label != Complexity::Simple);
  }
}

TEST_CASE("synthetic corpus: valid, seed-deterministic, loader-clean") {
  std::vector<QAExample> corpus = generate_synthetic_corpus(40, Split::Train, 7151);
  REQUIRE(corpus.size() == 40);

  std::vector<std::string> lines;
  for (const QAExample& example : corpus) {
    lines.push_back(example_to_json(example).dump());
  }
  LoadResult loaded = load_lines(lines);
  CHECK(loaded.report.loaded == 40);
  CHECK(loaded.report.quarantined.empty());

  std::vector<QAExample> again = generate_synthetic_corpus(40, Split::Train, 7151);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(corpus[i].id == again[i].id);
    CHECK(corpus[i].context == again[i].context);
    CHECK(corpus[i].gold_answer == again[i].gold_answer);
    CHECK(corpus[i].reference_program == again[i].reference_program);
  }

  std::vector<QAExample> different = generate_synthetic_corpus(40, Split::Train, 999);
  bool any_differs = false;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].context != different[i].context) any_differs = true;
  }
  CHECK(any_differs);
}
