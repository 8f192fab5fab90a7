#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "simdsl/ast.hpp"
#include "simdsl/interpreter.hpp"

namespace simdsl {

struct RewardConfig {
  double gamma = 0.5;                    // weight of the syntactic score
  double real_equality_tolerance = 1e-6; // absolute, for Real state matching
  int bleu_max_order = 4;
  ExecLimits exec_limits{};
};

struct SimilarityScores {
  double q_syntactic = 0.0;
  double q_semantic = 0.0;
  double gamma = 0.5;
  double q_combined = 0.0;
  std::size_t t_max = 0;
  std::size_t t_min = 0;
  std::size_t matched_states = 0;
};

// Sentence-level BLEU with uniform weights over orders 1..max_order,
// brevity penalty exp(1 - ref_len/cand_len) when the candidate is shorter,
// and add-one smoothing of numerator and denominator for orders >= 2
// (unsmoothed higher-order precision collapses to zero on short programs).
// Identical sequences score exactly 1.0; an empty candidate scores 0.0.
double bleu(const std::vector<std::string>& reference_tokens,
            const std::vector<std::string>& candidate_tokens,
            int max_order = 4);

// True when two states agree on the union of their defined identifiers.
// Int pairs compare exactly; any Real operand compares numerically within
// the absolute tolerance. A variable defined on one side only is a
// mismatch.
bool states_match(const State& a, const State& b, double real_tolerance);

struct SemanticResult {
  double q_semantic = 0.0;
  std::size_t matched = 0;
  std::size_t t_min = 0;
  std::size_t t_max = 0;
};

// Executes both programs and counts timestamps at which the state
// snapshots match, normalized by the longer trace. When both traces are
// empty the score is 0 (two crashing programs are not rewarded as equal).
SemanticResult semantic_reward(const Program& reference,
                               const Program& predicted,
                               double real_tolerance = 1e-6,
                               const ExecLimits& limits = {});

struct CombinedReward {
  SimilarityScores scores;
  bool predicted_parses = true;
};

// Q = gamma * Q_syntactic + (1 - gamma) * Q_semantic. The reference must
// parse (dataset guarantee; throws std::invalid_argument otherwise). A
// predicted program that fails to lex/parse still gets a BLEU score over
// its raw tokens when lexable, a semantic score of 0, and the
// predicted_parses flag cleared.
CombinedReward combined_reward(const std::string& reference_source,
                               const std::string& predicted_source,
                               const RewardConfig& config = {});

nlohmann::json scores_to_json(const SimilarityScores& scores,
                              bool predicted_parses);

}  // namespace simdsl
