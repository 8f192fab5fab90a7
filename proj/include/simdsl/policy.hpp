#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "simdsl/vocabulary.hpp"

namespace simdsl {

// A (context, question) pair with its extracted numbers, the conditioning
// input of the policy.
struct PromptContext {
  std::string context;
  std::string question;
  std::vector<std::string> numbers;

  static PromptContext make(std::string context, std::string question);
};

struct TrainSequence {
  PromptContext prompt;
  std::vector<int> tokens;  // includes the terminal EOS
};

struct WeightedSequence {
  PromptContext prompt;
  std::vector<int> tokens;
  double weight = 0.0;  // reward Q
};

// Autoregressive token distribution over the vocabulary, conditioned on a
// prompt. Queries are read-only and safe to run concurrently; updates
// require exclusive access.
class PolicyModel {
 public:
  virtual ~PolicyModel() = default;

  virtual const Vocabulary& vocab() const = 0;

  // Distribution over the next token given the generated prefix (BOS
  // implied, not part of the prefix). Entries are >= 0 and sum to 1;
  // copy slots beyond the prompt's number count and BOS itself get 0.
  virtual std::vector<double> next_dist(const PromptContext& prompt,
                                        const std::vector<int>& prefix) const = 0;

  // Sum over positions of log next_dist(prompt, seq[0..t))[seq[t]].
  virtual double sequence_logprob(const PromptContext& prompt,
                                  const std::vector<int>& seq) const;

  // Gradient step on (1/|batch|) * sum_i weight_i * log p(seq_i | prompt_i).
  virtual void reinforce_update(const std::vector<WeightedSequence>& batch,
                                double learning_rate) = 0;

  // Cross-entropy step; identical to reinforce_update with all weights 1,
  // and implemented that way so the two coincide bit for bit.
  virtual void mle_update(const std::vector<TrainSequence>& batch,
                          double learning_rate);

  virtual std::unique_ptr<PolicyModel> clone() const = 0;
};

using FeatureId = std::uint64_t;
using SparseVector = std::unordered_map<FeatureId, double>;

struct LogLinearOptions {
  // Positions past this index share one bucket.
  int max_position_bucket = 31;
};

// Softmax-over-features reference policy. Features of (history, candidate):
// candidate identity, the previous one and two tokens, a position bucket,
// and a shared indicator that the candidate is a literal present in the
// prompt (or a copy slot). The log-likelihood gradient is closed-form:
// phi(observed) - E_p[phi].
class LogLinearPolicy final : public PolicyModel {
 public:
  explicit LogLinearPolicy(Vocabulary vocab, LogLinearOptions options = {});

  const Vocabulary& vocab() const override { return vocab_; }

  std::vector<double> next_dist(const PromptContext& prompt,
                                const std::vector<int>& prefix) const override;

  void reinforce_update(const std::vector<WeightedSequence>& batch,
                        double learning_rate) override;

  std::unique_ptr<PolicyModel> clone() const override;

  // Sparse gradient of sequence_logprob with respect to the weights.
  SparseVector sequence_logprob_gradient(const PromptContext& prompt,
                                         const std::vector<int>& seq) const;

  double weight(FeatureId id) const;
  void set_weight(FeatureId id, double value);
  const SparseVector& weights() const { return weights_; }
  const LogLinearOptions& options() const { return options_; }

  // Feature ids active for `candidate` after `prefix`; exposed for the
  // finite-difference check.
  std::vector<FeatureId> features(const PromptContext& prompt,
                                  const std::vector<int>& prefix,
                                  int candidate) const;

 private:
  std::vector<double> scores(const PromptContext& prompt,
                             const std::vector<int>& prefix) const;

  Vocabulary vocab_;
  LogLinearOptions options_;
  SparseVector weights_;
};

struct BeamCandidate {
  std::vector<int> token_ids;  // without BOS/EOS
  double logprob = 0.0;
  bool finished = false;  // reached EOS (as opposed to the length cap)
};

// Length-capped beam search from BOS; candidates end at EOS or max_len.
// Deterministic: ties in logprob break on the token id sequence. Returns
// at most n_return candidates sorted by logprob descending. Requires
// beam_width >= n_return >= 1.
std::vector<BeamCandidate> beam_search(const PolicyModel& model,
                                       const PromptContext& prompt,
                                       int beam_width, int n_return,
                                       int max_len);

// Joins token surfaces into DSL source. A minus sign directly before a
// literal in expression-start position is re-attached so negated literals
// survive the round trip.
std::string render_program(const Vocabulary& vocab, const PromptContext& prompt,
                           const std::vector<int>& token_ids);

struct MleReport {
  double initial_nll = 0.0;
  std::vector<double> epoch_nll;  // after each epoch
};

// Full-batch gradient descent on mean sequence NLL (convex for the
// log-linear policy, so the loss is non-increasing for small enough lr).
// Throws std::invalid_argument on an empty dataset and std::runtime_error
// if the NLL rises by more than 10% between epochs.
MleReport mle_pretrain(PolicyModel& model,
                       const std::vector<TrainSequence>& dataset, int epochs,
                       double learning_rate);

// Max relative error between the analytic sequence-logprob gradient and a
// central finite difference, over the features the gradient touches.
double loglinear_gradient_check(const LogLinearPolicy& model,
                                const PromptContext& prompt,
                                const std::vector<int>& seq,
                                double fd_step = 1e-5);

// Self-describing JSON checkpoint (magic header + version + vocabulary +
// weights). Loading validates both magic and version.
void save_checkpoint(const LogLinearPolicy& model, const std::string& path);
LogLinearPolicy load_checkpoint(const std::string& path);

nlohmann::json checkpoint_to_json(const LogLinearPolicy& model);
LogLinearPolicy checkpoint_from_json(const nlohmann::json& j);

}  // namespace simdsl
