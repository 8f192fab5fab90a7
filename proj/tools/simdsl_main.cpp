#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "simdsl/dataset.hpp"
#include "simdsl/harness.hpp"
#include "simdsl/interpreter.hpp"
#include "simdsl/lexer.hpp"
#include "simdsl/parser.hpp"
#include "simdsl/policy.hpp"
#include "simdsl/printer.hpp"
#include "simdsl/similarity.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitRuntimeError = 2;
constexpr int kExitInternalError = 3;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::uint64_t default_max_steps() {
  if (const char* env = std::getenv("SIMDSL_MAX_STEPS")) {
    char* end = nullptr;
    unsigned long long value = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && value > 0) return value;
    std::cerr << "warning: ignoring invalid SIMDSL_MAX_STEPS='" << env << "'\n";
  }
  return 1'000'000;
}

void print_diagnostics(const std::string& file, const std::string& source,
                       const std::vector<simdsl::Diagnostic>& diagnostics) {
  simdsl::LineMap lines(source);
  for (const simdsl::Diagnostic& diag : diagnostics) {
    std::cerr << simdsl::format_diagnostic(file, lines, diag) << "\n";
  }
}

json diagnostics_to_json(const std::string& file, const std::string& source,
                         const std::vector<simdsl::Diagnostic>& diagnostics) {
  simdsl::LineMap lines(source);
  json arr = json::array();
  for (const simdsl::Diagnostic& diag : diagnostics) {
    auto pos = lines.locate(diag.span.begin);
    arr.push_back({{"file", file},
                   {"line", pos.line},
                   {"column", pos.column},
                   {"message", diag.message}});
  }
  return arr;
}

struct ProgramFile {
  std::string source;
  simdsl::Program program;
};

// Reads and parses a .sdsl file; on failure prints diagnostics and returns
// nullopt (caller exits with kExitInputError).
std::optional<ProgramFile> load_program(const std::string& path) {
  std::optional<std::string> source = read_file(path);
  if (!source) {
    std::cerr << "error: cannot open file '" << path << "'\n";
    return std::nullopt;
  }
  simdsl::ParseResult parsed = simdsl::parse_source(*source);
  if (!parsed.ok()) {
    print_diagnostics(path, *source, parsed.diagnostics);
    return std::nullopt;
  }
  return ProgramFile{std::move(*source), std::move(*parsed.program)};
}

std::vector<simdsl::QAExample> filter_split(std::vector<simdsl::QAExample> all,
                                            const std::string& split) {
  if (split == "all") return all;
  simdsl::Split want = split == "train" ? simdsl::Split::Train : simdsl::Split::Test;
  std::vector<simdsl::QAExample> out;
  for (auto& example : all) {
    if (example.split == want) out.push_back(std::move(example));
  }
  return out;
}

struct DatasetArgs {
  std::string path;
  std::string split = "train";
};

std::optional<std::vector<simdsl::QAExample>> load_examples(
    const DatasetArgs& args) {
  simdsl::LoadResult loaded;
  try {
    loaded = simdsl::load_dataset(args.path);
  } catch (const std::runtime_error& error) {
    std::cerr << "error: " << error.what() << "\n";
    return std::nullopt;
  }
  for (const auto& item : loaded.report.quarantined) {
    std::cerr << args.path << ": line " << item.line
              << " quarantined: " << item.reason << "\n";
  }
  std::vector<simdsl::QAExample> examples =
      filter_split(std::move(loaded.examples), args.split);
  if (examples.empty()) {
    std::cerr << "error: no usable examples in split '" << args.split << "' of "
              << args.path << "\n";
    return std::nullopt;
  }
  return examples;
}

int cmd_check(const std::string& path, const std::string& format) {
  std::optional<std::string> source = read_file(path);
  if (!source) {
    std::cerr << "error: cannot open file '" << path << "'\n";
    return kExitInputError;
  }
  simdsl::ParseResult parsed = simdsl::parse_source(*source);
  if (!parsed.ok()) {
    if (format == "json") {
      std::cout << json{{"ok", false},
                        {"diagnostics",
                         diagnostics_to_json(path, *source, parsed.diagnostics)}}
                       .dump()
                << "\n";
    }
    print_diagnostics(path, *source, parsed.diagnostics);
    return kExitInputError;
  }
  std::string pretty = simdsl::pretty_print(*parsed.program);
  if (format == "json") {
    std::cout << json{{"ok", true}, {"pretty", pretty}}.dump() << "\n";
  } else {
    std::cout << pretty;
  }
  return kExitOk;
}

int cmd_run(const std::string& path, bool with_trace, std::uint64_t max_steps,
            const std::string& format) {
  std::optional<ProgramFile> file = load_program(path);
  if (!file) return kExitInputError;

  simdsl::ExecutionOutcome outcome =
      simdsl::execute(file->program, simdsl::ExecLimits{max_steps});
  if (const simdsl::RuntimeFault* fault = outcome.fault()) {
    std::cerr << path << ": runtime error: " << simdsl::describe_fault(*fault)
              << "\n";
    return kExitRuntimeError;
  }
  if (!outcome.returned()) {
    std::cerr << path << ": program did not return a value\n";
    return kExitRuntimeError;
  }
  const simdsl::Value& value = std::get<simdsl::Returned>(outcome.status).value;
  if (format == "json") {
    json out{{"answer", simdsl::answer_of(outcome).value()}};
    if (with_trace) out["trace"] = simdsl::trace_to_json(outcome.trace);
    std::cout << out.dump() << "\n";
  } else {
    if (with_trace) {
      std::cout << simdsl::trace_to_json(outcome.trace).dump(2) << "\n";
    }
    std::cout << simdsl::value_to_string(value) << "\n";
  }
  return kExitOk;
}

int cmd_trace(const std::string& path, std::uint64_t max_steps) {
  std::optional<ProgramFile> file = load_program(path);
  if (!file) return kExitInputError;

  simdsl::ExecutionOutcome outcome =
      simdsl::execute(file->program, simdsl::ExecLimits{max_steps});
  std::cout << simdsl::trace_to_json(outcome.trace).dump(2) << "\n";
  if (const simdsl::RuntimeFault* fault = outcome.fault()) {
    std::cerr << path << ": runtime error: " << simdsl::describe_fault(*fault)
              << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}

int cmd_score(const std::string& reference_path, const std::string& predicted_path,
              double gamma, double tolerance, int max_order,
              std::uint64_t max_steps) {
  std::optional<std::string> reference = read_file(reference_path);
  if (!reference) {
    std::cerr << "error: cannot open file '" << reference_path << "'\n";
    return kExitInputError;
  }
  std::optional<std::string> predicted = read_file(predicted_path);
  if (!predicted) {
    std::cerr << "error: cannot open file '" << predicted_path << "'\n";
    return kExitInputError;
  }
  simdsl::ParseResult ref_parse = simdsl::parse_source(*reference);
  if (!ref_parse.ok()) {
    print_diagnostics(reference_path, *reference, ref_parse.diagnostics);
    return kExitInputError;
  }

  simdsl::RewardConfig config;
  config.gamma = gamma;
  config.real_equality_tolerance = tolerance;
  config.bleu_max_order = max_order;
  config.exec_limits.max_steps = max_steps;

  simdsl::CombinedReward reward =
      simdsl::combined_reward(*reference, *predicted, config);
  std::cout << simdsl::scores_to_json(reward.scores, reward.predicted_parses).dump()
            << "\n";
  return kExitOk;
}

struct TrainArgs {
  DatasetArgs dataset;
  std::string checkpoint_out;
  std::string checkpoint_in;
  std::string log_path;
  simdsl::HarnessConfig config;
};

int cmd_train(const TrainArgs& args) {
  auto examples = load_examples(args.dataset);
  if (!examples) return kExitInputError;

  simdsl::LogLinearPolicy model{simdsl::Vocabulary{}};
  simdsl::HarnessConfig config = args.config;
  if (!args.checkpoint_in.empty()) {
    try {
      model = simdsl::load_checkpoint(args.checkpoint_in);
    } catch (const std::runtime_error& error) {
      std::cerr << "error: " << error.what() << "\n";
      return kExitInputError;
    }
    config.mle_pretrain_first = false;
  } else {
    std::vector<std::vector<std::string>> token_seqs;
    std::vector<std::vector<std::string>> prompt_numbers;
    for (const auto& example : *examples) {
      token_seqs.push_back(
          simdsl::program_tokens(example.reference_program).tokens);
      prompt_numbers.push_back(simdsl::prompt_of(example).numbers);
    }
    simdsl::Vocabulary vocab = simdsl::Vocabulary::build(token_seqs);
    std::cerr << "vocabulary: " << vocab.size() << " tokens, UNK rate "
              << vocab.unk_rate(token_seqs, prompt_numbers) << "\n";
    model = simdsl::LogLinearPolicy{std::move(vocab)};
    config.mle_pretrain_first = true;
  }

  std::vector<simdsl::TrainingRecord> records =
      simdsl::reinforce_train(model, *examples, config);

  if (!args.log_path.empty()) {
    std::ofstream log(args.log_path);
    if (!log) {
      std::cerr << "error: cannot open log file '" << args.log_path << "'\n";
      return kExitInputError;
    }
    for (const auto& record : records) {
      log << simdsl::training_record_to_json(record).dump() << "\n";
    }
  }
  try {
    simdsl::save_checkpoint(model, args.checkpoint_out);
  } catch (const std::runtime_error& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitInputError;
  }

  if (!records.empty()) {
    const auto& last = records.back();
    std::cerr << "trained " << config.epochs << " epoch(s), " << records.size()
              << " batch update(s); final mean Q " << last.mean_q
              << ", parseable " << last.frac_parseable << ", executable "
              << last.frac_executable << "\n";
  }
  std::cerr << "checkpoint written to " << args.checkpoint_out << "\n";
  return kExitOk;
}

struct EvalArgs {
  DatasetArgs dataset;
  std::string checkpoint;
  std::string mode = "exact";
  std::string format = "text";
  simdsl::HarnessConfig config;
};

int cmd_eval(const EvalArgs& args) {
  auto examples = load_examples(args.dataset);
  if (!examples) return kExitInputError;

  simdsl::LogLinearPolicy model{simdsl::Vocabulary{}};
  try {
    model = simdsl::load_checkpoint(args.checkpoint);
  } catch (const std::runtime_error& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitInputError;
  }

  simdsl::EvalMode mode = args.mode == "mc" ? simdsl::EvalMode::MultipleChoice
                                            : simdsl::EvalMode::Exact;
  simdsl::EvalResult result =
      simdsl::evaluate_accuracy(model, *examples, args.config, mode);

  if (args.format == "json") {
    json rows = json::array();
    for (const auto& per : result.results) {
      json row{{"id", per.id},
               {"gold", per.gold},
               {"correct", per.correct},
               {"program", per.program_source}};
      row["predicted"] = per.predicted ? json(*per.predicted) : json(nullptr);
      rows.push_back(std::move(row));
    }
    std::cout << json{{"accuracy", result.accuracy}, {"results", std::move(rows)}}
                     .dump()
              << "\n";
  } else {
    std::size_t correct = 0;
    for (const auto& per : result.results) {
      if (per.correct) ++correct;
    }
    std::cout << "accuracy: " << result.accuracy << " (" << correct << "/"
              << result.results.size() << ")\n";
  }
  return kExitOk;
}

struct SweepArgs {
  DatasetArgs train_dataset;
  std::string checkpoint;
  std::vector<double> gammas;
  std::string format = "text";
  simdsl::HarnessConfig config;
};

int cmd_sweep(const SweepArgs& args) {
  DatasetArgs train_args = args.train_dataset;
  train_args.split = "train";
  auto train = load_examples(train_args);
  if (!train) return kExitInputError;
  DatasetArgs test_args = args.train_dataset;
  test_args.split = "test";
  auto test = load_examples(test_args);
  if (!test) return kExitInputError;

  simdsl::LogLinearPolicy model{simdsl::Vocabulary{}};
  try {
    model = simdsl::load_checkpoint(args.checkpoint);
  } catch (const std::runtime_error& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitInputError;
  }

  std::vector<simdsl::SweepRow> rows =
      simdsl::gamma_sweep(model, *train, *test, args.gammas, args.config);

  if (args.format == "json") {
    json arr = json::array();
    for (const auto& row : rows) {
      arr.push_back({{"gamma", row.gamma}, {"accuracy", row.accuracy}});
    }
    std::cout << arr.dump() << "\n";
  } else {
    std::cout << "gamma\taccuracy\n";
    for (const auto& row : rows) {
      std::cout << row.gamma << "\t" << row.accuracy << "\n";
    }
  }
  return kExitOk;
}

int cmd_classify(const std::string& program_path, const DatasetArgs& dataset,
                 const std::string& format) {
  auto emit = [&](const std::string& name, const simdsl::ComplexityLabel& label,
                  json& rows) {
    if (format == "json") {
      rows.push_back({{"id", name},
                      {"label", simdsl::complexity_name(label.label)},
                      {"if_branches", label.if_branches},
                      {"loop_branches", label.loop_branches},
                      {"state_changes", label.state_changes}});
    } else {
      std::cout << name << ": " << simdsl::complexity_name(label.label)
                << " (ifs=" << label.if_branches
                << ", loops=" << label.loop_branches
                << ", state_changes=" << label.state_changes << ")\n";
    }
  };

  json rows = json::array();
  if (!program_path.empty()) {
    std::optional<ProgramFile> file = load_program(program_path);
    if (!file) return kExitInputError;
    emit(program_path, simdsl::classify_complexity(file->program), rows);
  } else {
    auto examples = load_examples(dataset);
    if (!examples) return kExitInputError;
    for (const auto& example : *examples) {
      emit(example.id, simdsl::classify_complexity(example), rows);
    }
  }
  if (format == "json") {
    std::cout << rows.dump() << "\n";
  }
  return kExitOk;
}

void add_harness_flags(CLI::App* cmd, simdsl::HarnessConfig& config) {
  cmd->add_option("--gamma", config.gamma, "Syntactic/semantic mixing weight")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--n", config.n_candidates, "Candidates decoded per example");
  cmd->add_option("--s", config.keep_top, "Reward-best candidates kept");
  cmd->add_option("--batch", config.batch_size, "Sequences per update");
  cmd->add_option("--beam-width", config.beam_width, "Beam width");
  cmd->add_option("--epochs", config.epochs, "Fine-tuning epochs");
  cmd->add_option("--lr", config.learning_rate, "Learning rate");
  cmd->add_option("--seed", config.seed, "Random seed");
  cmd->add_option("--max-decode-len", config.max_decode_len,
                  "Longest decodable program, in tokens");
  cmd->add_option("--max-steps", config.exec_limits.max_steps,
                  "Execution step cap while scoring");
  cmd->add_option("--jobs", config.jobs,
                  "Worker threads for evaluation (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "simdsl: toolchain for a small process-simulation language — parse, "
      "run, trace, score program pairs, and train a program-synthesis policy"};
  app.require_subcommand(1);

  std::uint64_t env_max_steps = default_max_steps();

  // check
  std::string check_file, check_format = "text";
  CLI::App* check = app.add_subcommand("check", "Validate a program and print its canonical form");
  check->add_option("file", check_file, "Program file (.sdsl)")->required();
  check->add_option("--format", check_format)->check(CLI::IsMember({"text", "json"}));

  // run
  std::string run_file, run_format = "text";
  bool run_trace = false;
  std::uint64_t run_max_steps = env_max_steps;
  CLI::App* run = app.add_subcommand("run", "Execute a program and print its answer");
  run->add_option("file", run_file)->required();
  run->add_flag("--trace", run_trace, "Also print the JSON state trace");
  run->add_option("--max-steps", run_max_steps, "Execution step cap");
  run->add_option("--format", run_format)->check(CLI::IsMember({"text", "json"}));

  // trace
  std::string trace_file;
  std::uint64_t trace_max_steps = env_max_steps;
  CLI::App* trace = app.add_subcommand("trace", "Execute a program and print its JSON state trace");
  trace->add_option("file", trace_file)->required();
  trace->add_option("--max-steps", trace_max_steps, "Execution step cap");

  // score
  std::string score_ref, score_pred;
  double score_gamma = 0.5, score_tolerance = 1e-6;
  int score_max_order = 4;
  std::uint64_t score_max_steps = env_max_steps;
  CLI::App* score = app.add_subcommand("score", "Score a (reference, predicted) program pair");
  score->add_option("reference", score_ref)->required();
  score->add_option("predicted", score_pred)->required();
  score->add_option("--gamma", score_gamma)->check(CLI::Range(0.0, 1.0));
  score->add_option("--tolerance", score_tolerance, "Real-equality tolerance");
  score->add_option("--max-order", score_max_order, "BLEU n-gram order");
  score->add_option("--max-steps", score_max_steps, "Execution step cap");

  // train
  TrainArgs train_args;
  train_args.config.exec_limits.max_steps = env_max_steps;
  CLI::App* train = app.add_subcommand("train", "MLE pre-train and REINFORCE fine-tune a policy");
  train->add_option("--dataset", train_args.dataset.path)->required();
  train->add_option("--split", train_args.dataset.split)
      ->check(CLI::IsMember({"train", "test", "all"}));
  train->add_option("--checkpoint-out", train_args.checkpoint_out)->required();
  train->add_option("--checkpoint-in", train_args.checkpoint_in,
                    "Resume from a checkpoint (skips MLE pre-training)");
  train->add_option("--log", train_args.log_path, "Write per-batch JSONL records");
  train->add_option("--mle-epochs", train_args.config.mle_epochs);
  train->add_option("--mle-lr", train_args.config.mle_learning_rate);
  add_harness_flags(train, train_args.config);

  // eval
  EvalArgs eval_args;
  eval_args.dataset.split = "test";
  eval_args.config.exec_limits.max_steps = env_max_steps;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint's answer accuracy");
  eval->add_option("--dataset", eval_args.dataset.path)->required();
  eval->add_option("--split", eval_args.dataset.split)
      ->check(CLI::IsMember({"train", "test", "all"}));
  eval->add_option("--checkpoint", eval_args.checkpoint)->required();
  eval->add_option("--mode", eval_args.mode)->check(CLI::IsMember({"exact", "mc"}));
  eval->add_option("--format", eval_args.format)->check(CLI::IsMember({"text", "json"}));
  add_harness_flags(eval, eval_args.config);

  // sweep
  SweepArgs sweep_args;
  sweep_args.config.exec_limits.max_steps = env_max_steps;
  CLI::App* sweep = app.add_subcommand("sweep", "Fine-tune and evaluate across gamma values");
  sweep->add_option("--dataset", sweep_args.train_dataset.path)->required();
  sweep->add_option("--checkpoint", sweep_args.checkpoint)->required();
  sweep->add_option("--gammas", sweep_args.gammas, "Gamma values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--format", sweep_args.format)
      ->check(CLI::IsMember({"text", "json"}));
  add_harness_flags(sweep, sweep_args.config);

  // classify
  std::string classify_file, classify_format = "text";
  DatasetArgs classify_dataset;
  classify_dataset.split = "all";
  CLI::App* classify = app.add_subcommand("classify", "Label programs as complex/simple/other");
  classify->add_option("file", classify_file, "Program file (.sdsl)");
  classify->add_option("--dataset", classify_dataset.path);
  classify->add_option("--split", classify_dataset.split)
      ->check(CLI::IsMember({"train", "test", "all"}));
  classify->add_option("--format", classify_format)
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (check->parsed()) return cmd_check(check_file, check_format);
    if (run->parsed()) return cmd_run(run_file, run_trace, run_max_steps, run_format);
    if (trace->parsed()) return cmd_trace(trace_file, trace_max_steps);
    if (score->parsed()) {
      return cmd_score(score_ref, score_pred, score_gamma, score_tolerance,
                       score_max_order, score_max_steps);
    }
    if (train->parsed()) return cmd_train(train_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (classify->parsed()) {
      if (classify_file.empty() == classify_dataset.path.empty()) {
        std::cerr << "error: classify needs exactly one of a program file or "
                     "--dataset\n";
        return kExitInputError;
      }
      return cmd_classify(classify_file, classify_dataset, classify_format);
    }
  } catch (const std::invalid_argument& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& error) {
    std::cerr << "internal error: " << error.what() << "\n";
    return kExitInternalError;
  }
  return kExitOk;
}
