#include "simdsl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "simdsl/lexer.hpp"
#include "simdsl/parser.hpp"

namespace simdsl {

void HarnessConfig::validate() const {
  if (n_candidates < 1 || keep_top < 1 || batch_size < 1) {
    throw std::invalid_argument("harness: N, S and B must all be >= 1");
  }
  if (keep_top > n_candidates) {
    throw std::invalid_argument("harness: S must not exceed N");
  }
  if (batch_size < keep_top) {
    throw std::invalid_argument("harness: B must be >= S");
  }
  if (beam_width < n_candidates) {
    throw std::invalid_argument("harness: beam width must be >= N");
  }
  if (gamma < 0.0 || gamma > 1.0) {
    throw std::invalid_argument("harness: gamma must lie in [0, 1]");
  }
  if (epochs < 1 || max_decode_len < 1) {
    throw std::invalid_argument("harness: epochs and decode length must be >= 1");
  }
  if (real_tolerance <= 0.0) {
    throw std::invalid_argument("harness: real tolerance must be positive");
  }
  if (bleu_max_order < 1) {
    throw std::invalid_argument("harness: BLEU max order must be >= 1");
  }
}

RewardConfig HarnessConfig::reward_config() const {
  RewardConfig cfg;
  cfg.gamma = gamma;
  cfg.real_equality_tolerance = real_tolerance;
  cfg.bleu_max_order = bleu_max_order;
  cfg.exec_limits = exec_limits;
  return cfg;
}

PromptContext prompt_of(const QAExample& example) {
  return PromptContext::make(example.context, example.question);
}

std::vector<TrainSequence> encode_examples(const Vocabulary& vocab,
                                           const std::vector<QAExample>& examples) {
  std::vector<TrainSequence> sequences;
  sequences.reserve(examples.size());
  for (const QAExample& example : examples) {
    TokenStringsResult tokens = program_tokens(example.reference_program);
    if (!tokens.ok()) {
      throw std::invalid_argument("encode_examples: reference program of '" +
                                  example.id + "' does not lex");
    }
    TrainSequence seq;
    seq.prompt = prompt_of(example);
    seq.tokens = vocab.encode(tokens.tokens, seq.prompt.numbers);
    seq.tokens.push_back(vocab.eos());
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

nlohmann::json training_record_to_json(const TrainingRecord& record) {
  return nlohmann::json{{"epoch", record.epoch},
                        {"batch", record.batch_index},
                        {"mean_loss", record.mean_loss},
                        {"mean_q", record.mean_q},
                        {"frac_parseable", record.frac_parseable},
                        {"frac_executable", record.frac_executable},
                        {"timestamp_ms", record.timestamp_ms}};
}

namespace {

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct CandidateScore {
  double q = 0.0;
  double logprob = 0.0;
  std::vector<int> update_tokens;  // decoded ids plus EOS when finished
  bool parseable = false;
  bool executable = false;
};

}  // namespace

std::vector<TrainingRecord> reinforce_train(PolicyModel& model,
                                            const std::vector<QAExample>& train,
                                            const HarnessConfig& config) {
  config.validate();
  if (train.empty()) {
    throw std::invalid_argument("reinforce_train: empty training set");
  }

  if (config.mle_pretrain_first) {
    mle_pretrain(model, encode_examples(model.vocab(), train), config.mle_epochs,
                 config.mle_learning_rate);
  }

  const RewardConfig reward_cfg = config.reward_config();
  const Vocabulary& vocab = model.vocab();

  std::vector<TrainingRecord> records;
  std::vector<WeightedSequence> batch;
  std::vector<PromptContext> batch_prompts;  // parallel to batch
  std::size_t seen = 0, seen_parseable = 0, seen_executable = 0;
  int batch_index = 0;

  auto run_update = [&](int epoch, std::size_t take) {
    if (take == 0) return;
    std::vector<WeightedSequence> current(batch.begin(), batch.begin() + take);
    batch.erase(batch.begin(), batch.begin() + take);

    double loss_sum = 0.0;
    double q_sum = 0.0;
    for (const WeightedSequence& ws : current) {
      loss_sum += -ws.weight * model.sequence_logprob(ws.prompt, ws.tokens);
      q_sum += ws.weight;
    }
    TrainingRecord record;
    record.epoch = epoch;
    record.batch_index = batch_index++;
    record.mean_loss = loss_sum / static_cast<double>(current.size());
    record.mean_q = q_sum / static_cast<double>(current.size());
    record.frac_parseable =
        seen == 0 ? 0.0 : static_cast<double>(seen_parseable) / seen;
    record.frac_executable =
        seen == 0 ? 0.0 : static_cast<double>(seen_executable) / seen;
    record.timestamp_ms = now_ms();
    records.push_back(record);

    model.reinforce_update(current, config.learning_rate);
    seen = seen_parseable = seen_executable = 0;
  };

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t index : order) {
      const QAExample& example = train[index];
      PromptContext prompt = prompt_of(example);
      std::vector<BeamCandidate> candidates =
          beam_search(model, prompt, config.beam_width, config.n_candidates,
                      config.max_decode_len);

      std::vector<CandidateScore> scored;
      scored.reserve(candidates.size());
      for (const BeamCandidate& cand : candidates) {
        std::string source = render_program(vocab, prompt, cand.token_ids);
        CombinedReward reward =
            combined_reward(example.reference_program, source, reward_cfg);

        CandidateScore cs;
        cs.q = reward.scores.q_combined;
        cs.logprob = cand.logprob;
        cs.update_tokens = cand.token_ids;
        if (cand.finished) cs.update_tokens.push_back(vocab.eos());
        cs.parseable = reward.predicted_parses;
        if (cs.parseable) {
          ParseResult parsed = parse_source(source);
          ExecutionOutcome outcome = execute(*parsed.program, config.exec_limits);
          cs.executable = outcome.returned();
        }
        scored.push_back(std::move(cs));

        ++seen;
        if (scored.back().parseable) ++seen_parseable;
        if (scored.back().executable) ++seen_executable;
      }

      std::sort(scored.begin(), scored.end(),
                [](const CandidateScore& a, const CandidateScore& b) {
                  if (a.q != b.q) return a.q > b.q;
                  if (a.logprob != b.logprob) return a.logprob > b.logprob;
                  return a.update_tokens < b.update_tokens;
                });

      std::size_t take = std::min<std::size_t>(config.keep_top, scored.size());
      for (std::size_t i = 0; i < take; ++i) {
        batch.push_back(
            WeightedSequence{prompt, scored[i].update_tokens, scored[i].q});
      }
      while (batch.size() >= static_cast<std::size_t>(config.batch_size)) {
        run_update(epoch, static_cast<std::size_t>(config.batch_size));
      }
    }
    // leftover partial batch, averaged over its actual size
    run_update(epoch, batch.size());
  }
  return records;
}

AnswerResult answer_question(const PolicyModel& model, const std::string& context,
                             const std::string& question,
                             const HarnessConfig& config) {
  config.validate();
  PromptContext prompt = PromptContext::make(context, question);
  std::vector<BeamCandidate> candidates =
      beam_search(model, prompt, config.beam_width, config.n_candidates,
                  config.max_decode_len);

  AnswerResult result;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::string source =
        render_program(model.vocab(), prompt, candidates[i].token_ids);
    ParseResult parsed = parse_source(source);
    if (!parsed.ok()) {
      std::string reason = "candidate " + std::to_string(i) + ": parse error";
      if (!parsed.diagnostics.empty()) {
        reason += ": " + parsed.diagnostics.front().message;
      }
      result.candidate_failures.push_back(std::move(reason));
      continue;
    }
    ExecutionOutcome outcome = execute(*parsed.program, config.exec_limits);
    if (const RuntimeFault* fault = outcome.fault()) {
      result.candidate_failures.push_back("candidate " + std::to_string(i) +
                                          ": " + describe_fault(*fault));
      continue;
    }
    std::optional<double> answer = answer_of(outcome);
    if (!answer) {
      result.candidate_failures.push_back("candidate " + std::to_string(i) +
                                          ": program did not return a value");
      continue;
    }
    result.answer = answer;
    result.program_source = std::move(source);
    result.trace = std::move(outcome.trace);
    result.candidate_failures.clear();
    return result;
  }
  return result;
}

bool answers_match_exact(double predicted, double gold) {
  return std::abs(predicted - gold) <= std::max(1e-4 * std::abs(gold), 1e-6);
}

EvalResult evaluate_accuracy(const PolicyModel& model,
                             const std::vector<QAExample>& test_set,
                             const HarnessConfig& config, EvalMode mode) {
  config.validate();
  if (test_set.empty()) {
    throw std::invalid_argument("evaluate_accuracy: empty test set");
  }

  EvalResult result;
  result.results.resize(test_set.size());

  auto score_example = [&](std::size_t i) {
    const QAExample& example = test_set[i];
    AnswerResult answer =
        answer_question(model, example.context, example.question, config);

    EvalResult::PerExample per;
    per.id = example.id;
    per.gold = example.gold_answer;
    per.predicted = answer.answer;
    per.program_source = answer.program_source;
    if (answer.answer) {
      if (mode == EvalMode::Exact) {
        per.correct = answers_match_exact(*answer.answer, example.gold_answer);
      } else {
        // snap to the nearest option, first index winning ties
        std::size_t best = 0;
        for (std::size_t k = 1; k < example.options.size(); ++k) {
          if (std::abs(example.options[k] - *answer.answer) <
              std::abs(example.options[best] - *answer.answer)) {
            best = k;
          }
        }
        per.correct = example.options[best] == example.gold_answer;
      }
    }
    result.results[i] = std::move(per);
  };

  unsigned jobs = config.jobs == 0 ? std::thread::hardware_concurrency()
                                   : static_cast<unsigned>(config.jobs);
  if (jobs <= 1 || test_set.size() <= 1) {
    for (std::size_t i = 0; i < test_set.size(); ++i) score_example(i);
  } else {
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
      for (std::size_t i = cursor.fetch_add(1); i < test_set.size();
           i = cursor.fetch_add(1)) {
        score_example(i);
      }
    };
    std::vector<std::thread> pool;
    unsigned n = std::min<unsigned>(jobs, static_cast<unsigned>(test_set.size()));
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::size_t correct = 0;
  for (const auto& per : result.results) {
    if (per.correct) ++correct;
  }
  result.accuracy =
      static_cast<double>(correct) / static_cast<double>(test_set.size());
  return result;
}

std::vector<SweepRow> gamma_sweep(const PolicyModel& pretrained,
                                  const std::vector<QAExample>& train,
                                  const std::vector<QAExample>& test,
                                  const std::vector<double>& gammas,
                                  const HarnessConfig& config) {
  std::vector<SweepRow> rows;
  rows.reserve(gammas.size());
  for (double gamma : gammas) {
    std::unique_ptr<PolicyModel> model = pretrained.clone();
    HarnessConfig run_config = config;
    run_config.gamma = gamma;
    run_config.mle_pretrain_first = false;  // the checkpoint is the MLE stage
    reinforce_train(*model, train, run_config);
    EvalResult eval = evaluate_accuracy(*model, test, run_config, EvalMode::Exact);
    rows.push_back(SweepRow{gamma, eval.accuracy});
  }
  return rows;
}

}  // namespace simdsl
