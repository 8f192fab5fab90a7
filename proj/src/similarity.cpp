#include "simdsl/similarity.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "simdsl/lexer.hpp"
#include "simdsl/parser.hpp"

namespace simdsl {

namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts ngram_counts(const std::vector<std::string>& tokens, int order) {
  NgramCounts counts;
  if (tokens.size() < static_cast<std::size_t>(order)) return counts;
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    std::string key;
    for (int k = 0; k < order; ++k) {
      key += tokens[i + k];
      key += '\x1f';
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

double bleu(const std::vector<std::string>& reference_tokens,
            const std::vector<std::string>& candidate_tokens, int max_order) {
  if (max_order < 1) {
    throw std::invalid_argument("bleu: max_order must be >= 1");
  }
  if (candidate_tokens.empty()) return 0.0;

  double log_sum = 0.0;
  for (int order = 1; order <= max_order; ++order) {
    NgramCounts ref = ngram_counts(reference_tokens, order);
    NgramCounts cand = ngram_counts(candidate_tokens, order);
    std::size_t total = 0;
    std::size_t matched = 0;
    for (const auto& [key, count] : cand) {
      total += count;
      auto it = ref.find(key);
      if (it != ref.end()) {
        matched += count < it->second ? count : it->second;
      }
    }
    double precision;
    if (order == 1) {
      precision = static_cast<double>(matched) / static_cast<double>(total);
      if (precision == 0.0) return 0.0;
    } else {
      // add-one smoothing keeps short programs from collapsing to zero
      precision = static_cast<double>(matched + 1) / static_cast<double>(total + 1);
    }
    log_sum += std::log(precision);
  }

  double score = std::exp(log_sum / max_order);
  if (candidate_tokens.size() < reference_tokens.size()) {
    score *= std::exp(1.0 - static_cast<double>(reference_tokens.size()) /
                                static_cast<double>(candidate_tokens.size()));
  }
  return score;
}

bool states_match(const State& a, const State& b, double real_tolerance) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;  // defined on one side only
    const Value& x = ia->second;
    const Value& y = ib->second;
    if (x.is_int() && y.is_int()) {
      if (x.as_int() != y.as_int()) return false;
    } else if (std::abs(x.widen() - y.widen()) > real_tolerance) {
      return false;
    }
  }
  return true;
}

SemanticResult semantic_reward(const Program& reference, const Program& predicted,
                               double real_tolerance, const ExecLimits& limits) {
  std::vector<State> ref_states = execute_and_get_state(reference, limits);
  std::vector<State> pred_states = execute_and_get_state(predicted, limits);

  SemanticResult result;
  result.t_min = ref_states.size() < pred_states.size() ? ref_states.size()
                                                        : pred_states.size();
  result.t_max = ref_states.size() > pred_states.size() ? ref_states.size()
                                                        : pred_states.size();
  for (std::size_t t = 0; t < result.t_min; ++t) {
    if (states_match(ref_states[t], pred_states[t], real_tolerance)) {
      ++result.matched;
    }
  }
  result.q_semantic =
      result.t_max == 0
          ? 0.0
          : static_cast<double>(result.matched) / static_cast<double>(result.t_max);
  return result;
}

CombinedReward combined_reward(const std::string& reference_source,
                               const std::string& predicted_source,
                               const RewardConfig& config) {
  TokenStringsResult ref_tokens = program_tokens(reference_source);
  ParseResult ref_parse = parse_source(reference_source);
  if (!ref_tokens.ok() || !ref_parse.ok()) {
    throw std::invalid_argument("combined_reward: reference program must parse");
  }

  CombinedReward out;
  out.scores.gamma = config.gamma;

  TokenStringsResult pred_tokens = program_tokens(predicted_source);
  if (pred_tokens.ok()) {
    out.scores.q_syntactic =
        bleu(ref_tokens.tokens, pred_tokens.tokens, config.bleu_max_order);
  }

  ParseResult pred_parse = pred_tokens.ok() ? parse_source(predicted_source)
                                            : ParseResult{};
  if (pred_parse.program.has_value()) {
    SemanticResult sem =
        semantic_reward(*ref_parse.program, *pred_parse.program,
                        config.real_equality_tolerance, config.exec_limits);
    out.scores.q_semantic = sem.q_semantic;
    out.scores.matched_states = sem.matched;
    out.scores.t_min = sem.t_min;
    out.scores.t_max = sem.t_max;
  } else {
    out.predicted_parses = false;
    out.scores.q_semantic = 0.0;
    out.scores.matched_states = 0;
    out.scores.t_min = 0;
    out.scores.t_max =
        execute_and_get_state(*ref_parse.program, config.exec_limits).size();
  }

  out.scores.q_combined = config.gamma * out.scores.q_syntactic +
                          (1.0 - config.gamma) * out.scores.q_semantic;
  return out;
}

nlohmann::json scores_to_json(const SimilarityScores& scores,
                              bool predicted_parses) {
  return nlohmann::json{{"q_syntactic", scores.q_syntactic},
                        {"q_semantic", scores.q_semantic},
                        {"gamma", scores.gamma},
                        {"q", scores.q_combined},
                        {"matched", scores.matched_states},
                        {"t_min", scores.t_min},
                        {"t_max", scores.t_max},
                        {"predicted_parses", predicted_parses}};
}

}  // namespace simdsl
