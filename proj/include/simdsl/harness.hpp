#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simdsl/dataset.hpp"
#include "simdsl/interpreter.hpp"
#include "simdsl/policy.hpp"
#include "simdsl/similarity.hpp"

namespace simdsl {

struct HarnessConfig {
  int n_candidates = 8;   // N: candidates sampled per example
  int keep_top = 4;       // S: reward-best candidates kept per example
  int batch_size = 32;    // B: sequences per update
  double gamma = 0.5;
  int beam_width = 32;
  double learning_rate = 0.05;
  int epochs = 5;
  std::uint64_t seed = 0;
  int max_decode_len = 96;
  ExecLimits exec_limits{100'000};
  double real_tolerance = 1e-6;
  int bleu_max_order = 4;
  bool mle_pretrain_first = false;  // run the cross-entropy stage first
  int mle_epochs = 50;
  double mle_learning_rate = 1.0;
  int jobs = 1;  // worker pool for evaluation; 0 = hardware concurrency

  void validate() const;  // throws std::invalid_argument
  RewardConfig reward_config() const;
};

struct TrainingRecord {
  int epoch = 0;
  int batch_index = 0;
  double mean_loss = 0.0;
  double mean_q = 0.0;
  double frac_parseable = 0.0;   // over candidates generated since last flush
  double frac_executable = 0.0;
  std::int64_t timestamp_ms = 0;
};

nlohmann::json training_record_to_json(const TrainingRecord& record);

// Policy-gradient loop: per example, beam-search N candidates, score each
// with the combined reward against the reference, keep the top S, and
// apply a batched update with loss -(1/B) sum Q_i log p(candidate_i) once
// B sequences accumulate. The leftover partial batch is flushed at the end
// of each epoch with the mean over its actual size. Examples are shuffled
// per epoch under the config seed.
std::vector<TrainingRecord> reinforce_train(PolicyModel& model,
                                            const std::vector<QAExample>& train,
                                            const HarnessConfig& config);

struct AnswerResult {
  std::optional<double> answer;
  std::string program_source;  // the program that produced the answer
  ExecutionTrace trace;
  std::vector<std::string> candidate_failures;  // reasons, when unanswered
};

// Beam-decodes candidates in logprob order and returns the first one that
// parses and executes to a returned value, together with its source and
// trace. When none does, answer is empty and every candidate's failure
// reason is listed.
AnswerResult answer_question(const PolicyModel& model,
                             const std::string& context,
                             const std::string& question,
                             const HarnessConfig& config);

enum class EvalMode { Exact, MultipleChoice };

struct EvalResult {
  double accuracy = 0.0;

  struct PerExample {
    std::string id;
    std::optional<double> predicted;
    double gold = 0.0;
    bool correct = false;
    std::string program_source;
  };
  std::vector<PerExample> results;
};

// Exact mode: relative tolerance 1e-4 (absolute 1e-6 near zero).
// Multiple-choice mode: the prediction maps to the nearest of the four
// options. Unanswered counts as incorrect. Examples are scored
// independently across the worker pool.
EvalResult evaluate_accuracy(const PolicyModel& model,
                             const std::vector<QAExample>& test_set,
                             const HarnessConfig& config, EvalMode mode);

bool answers_match_exact(double predicted, double gold);

struct SweepRow {
  double gamma = 0.0;
  double accuracy = 0.0;
};

// Fine-tunes a fresh clone of `pretrained` per gamma and evaluates each;
// a pure function of (seed, checkpoint, gamma).
std::vector<SweepRow> gamma_sweep(const PolicyModel& pretrained,
                                  const std::vector<QAExample>& train,
                                  const std::vector<QAExample>& test,
                                  const std::vector<double>& gammas,
                                  const HarnessConfig& config);

// Reference-program token sequences encoded under the model vocabulary,
// ready for MLE. Skips nothing: callers pass validated examples.
std::vector<TrainSequence> encode_examples(const Vocabulary& vocab,
                                           const std::vector<QAExample>& examples);

PromptContext prompt_of(const QAExample& example);

}  // namespace simdsl
