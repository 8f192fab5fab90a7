#include "simdsl/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "simdsl/parser.hpp"

namespace simdsl {

std::string version_name(DatasetVersion version) {
  return version == DatasetVersion::V1 ? "v1" : "v2";
}

std::string split_name(Split split) {
  return split == Split::Train ? "train" : "test";
}

std::string complexity_name(Complexity label) {
  switch (label) {
    case Complexity::Complex: return "complex";
    case Complexity::Simple: return "simple";
    case Complexity::Other: return "other";
  }
  return "other";
}

namespace {

bool answers_close(double a, double g) {
  double scale = std::max(std::abs(a), std::abs(g));
  return std::abs(a - g) <= std::max(1e-6 * scale, 1e-9);
}

// Validates one JSONL line; returns the failure reason or fills `out`.
std::optional<std::string> parse_example(const std::string& line, QAExample& out) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) return "invalid JSON";
  if (!j.is_object()) return "line is not a JSON object";

  for (const char* field : {"id", "version", "split", "context", "question",
                            "answer", "options", "program"}) {
    if (!j.contains(field)) return std::string("missing field '") + field + "'";
  }
  if (!j["id"].is_string() || !j["context"].is_string() ||
      !j["question"].is_string() || !j["program"].is_string()) {
    return "id/context/question/program must be strings";
  }
  if (!j["answer"].is_number()) return "answer must be a number";

  std::string version = j["version"].get<std::string>();
  if (version != "v1" && version != "v2") {
    return "unknown version '" + version + "'";
  }
  std::string split = j["split"].get<std::string>();
  if (split != "train" && split != "test") {
    return "unknown split '" + split + "'";
  }
  if (!j["options"].is_array() || j["options"].size() != 4) {
    return "options must be an array of 4 numbers";
  }

  out.id = j["id"].get<std::string>();
  out.version = version == "v1" ? DatasetVersion::V1 : DatasetVersion::V2;
  out.split = split == "train" ? Split::Train : Split::Test;
  out.context = j["context"].get<std::string>();
  out.question = j["question"].get<std::string>();
  out.gold_answer = j["answer"].get<double>();
  for (std::size_t i = 0; i < 4; ++i) {
    if (!j["options"][i].is_number()) return "options must be numbers";
    out.options[i] = j["options"][i].get<double>();
  }
  out.reference_program = j["program"].get<std::string>();

  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = i + 1; k < 4; ++k) {
      if (out.options[i] == out.options[k]) {
        return "options must be pairwise distinct";
      }
    }
  }
  bool gold_present = false;
  for (double option : out.options) {
    if (option == out.gold_answer) gold_present = true;
  }
  if (!gold_present) return "gold answer missing from options";

  ParseResult parsed = parse_source(out.reference_program);
  if (!parsed.ok()) {
    std::string reason = "reference program does not parse";
    if (!parsed.diagnostics.empty()) {
      reason += ": " + parsed.diagnostics.front().message;
    }
    return reason;
  }
  ExecutionOutcome outcome = execute(*parsed.program);
  if (outcome.faulted()) {
    return "reference program fails at runtime: " + describe_fault(*outcome.fault());
  }
  std::optional<double> answer = answer_of(outcome);
  if (!answer) return "reference program does not return a value";
  if (!answers_close(*answer, out.gold_answer)) {
    return "reference program returns " + std::to_string(*answer) +
           " but the gold answer is " + std::to_string(out.gold_answer);
  }
  return std::nullopt;
}

}  // namespace

LoadResult load_dataset_stream(std::istream& in) {
  LoadResult result;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    QAExample example;
    std::optional<std::string> reason = parse_example(line, example);
    if (reason) {
      result.report.quarantined.push_back({line_number, *reason});
      continue;
    }
    ++result.report.by_version[version_name(example.version)]
                             [split_name(example.split)];
    result.examples.push_back(std::move(example));
  }
  result.report.loaded = result.examples.size();
  return result;
}

LoadResult load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open dataset file: " + path);
  }
  return load_dataset_stream(in);
}

nlohmann::json LoadReport::to_json() const {
  nlohmann::json q = nlohmann::json::array();
  for (const Quarantined& item : quarantined) {
    q.push_back({{"line", item.line}, {"reason", item.reason}});
  }
  return nlohmann::json{
      {"loaded", loaded}, {"quarantined", std::move(q)}, {"by_version", by_version}};
}

nlohmann::json example_to_json(const QAExample& example) {
  return nlohmann::json{{"id", example.id},
                        {"version", version_name(example.version)},
                        {"split", split_name(example.split)},
                        {"context", example.context},
                        {"question", example.question},
                        {"answer", example.gold_answer},
                        {"options", example.options},
                        {"program", example.reference_program}};
}

namespace {

// Digits after the decimal point in the shortest round-trip rendering.
int display_precision(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, ptr);
  if (s.find('e') != std::string::npos) return 6;
  std::size_t dot = s.find('.');
  if (dot == std::string::npos) return 0;
  return static_cast<int>(s.size() - dot - 1);
}

double round_to(double value, int precision) {
  double scale = std::pow(10.0, precision);
  return std::round(value * scale) / scale;
}

}  // namespace

std::array<double, 3> generate_distractors(double gold, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double delta = std::abs(gold) >= 1.0 ? 0.3 * std::abs(gold) : 1.0;
  int precision = display_precision(gold);

  std::array<double, 3> picked{};
  std::size_t have = 0;
  std::uint64_t attempts = 0;
  std::uniform_real_distribution<double> dist(gold - delta, gold + delta);
  while (have < 3) {
    double x = round_to(dist(rng), precision);
    bool ok = std::isfinite(x) && x != gold && x >= gold - delta && x <= gold + delta;
    for (std::size_t i = 0; ok && i < have; ++i) {
      if (picked[i] == x) ok = false;
    }
    if (ok) picked[have++] = x;
    // widen the precision when rounding cannot produce three distinct values
    if (++attempts % 256 == 0 && precision < 12) ++precision;
  }
  return picked;
}

ComplexityLabel classify_complexity(const Program& program,
                                    const ExecLimits& limits) {
  ComplexityLabel label;
  label.if_branches = count_if_statements(program);
  label.loop_branches = count_repeat_statements(program);
  label.state_changes = count_state_changes(program, limits);

  if (label.if_branches >= 1 && label.loop_branches >= 1 &&
      label.state_changes > 15) {
    label.label = Complexity::Complex;
  } else if (label.if_branches <= 1 && label.loop_branches == 0 &&
             label.state_changes <= 5) {
    label.label = Complexity::Simple;
  } else {
    label.label = Complexity::Other;
  }
  return label;
}

ComplexityLabel classify_complexity(const QAExample& example) {
  ParseResult parsed = parse_source(example.reference_program);
  if (!parsed.ok()) {
    throw std::invalid_argument("classify_complexity: reference program of '" +
                                example.id + "' does not parse");
  }
  return classify_complexity(*parsed.program);
}

}  // namespace simdsl
