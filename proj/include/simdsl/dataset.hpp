#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "simdsl/ast.hpp"
#include "simdsl/interpreter.hpp"

#include "json.hpp"

namespace simdsl {

enum class DatasetVersion { V1, V2 };
enum class Split { Train, Test };

std::string version_name(DatasetVersion version);
std::string split_name(Split split);

struct QAExample {
  std::string id;
  DatasetVersion version = DatasetVersion::V1;
  Split split = Split::Train;
  std::string context;
  std::string question;
  double gold_answer = 0.0;
  std::array<double, 4> options{};  // contains gold_answer, pairwise distinct
  std::string reference_program;
};

struct LoadReport {
  std::size_t loaded = 0;

  struct Quarantined {
    std::size_t line = 0;  // 1-based line in the JSONL file
    std::string reason;
  };
  std::vector<Quarantined> quarantined;

  // version -> split -> count
  std::map<std::string, std::map<std::string, std::size_t>> by_version;

  nlohmann::json to_json() const;
};

struct LoadResult {
  std::vector<QAExample> examples;
  LoadReport report;
};

// UTF-8 JSON-lines, one example per line:
//   {id, version, split, context, question, answer, options, program}
// Every example is validated: the program must parse, execute without
// error, and reproduce the gold answer; options must be 4 distinct values
// containing the gold. Failures are quarantined with a reason, never
// loaded.
LoadResult load_dataset(const std::string& path);
LoadResult load_dataset_stream(std::istream& in);

nlohmann::json example_to_json(const QAExample& example);

// Three distinct wrong answers near the gold value: within +-30% (or
// +-1.0 when |gold| < 1), rounded to the gold's displayed precision (the
// precision is widened when it cannot yield three distinct values).
// Deterministic under the seed.
std::array<double, 3> generate_distractors(double gold, std::uint64_t seed);

enum class Complexity { Complex, Simple, Other };

std::string complexity_name(Complexity label);

struct ComplexityLabel {
  Complexity label = Complexity::Other;
  int if_branches = 0;        // static AST count
  int loop_branches = 0;      // static AST count
  std::uint64_t state_changes = 0;  // dynamic assignment count
};

// complex: >=1 if, >=1 loop, >15 dynamic state changes;
// simple:  <=1 if, no loops, <=5 dynamic state changes;
// everything else: other. The two predicates are mutually exclusive.
ComplexityLabel classify_complexity(const Program& program,
                                    const ExecLimits& limits = {});
ComplexityLabel classify_complexity(const QAExample& example);

}  // namespace simdsl
