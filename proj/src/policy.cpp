#include "simdsl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string_view>

namespace simdsl {

PromptContext PromptContext::make(std::string context, std::string question) {
  PromptContext prompt;
  prompt.numbers = extract_numbers(context + " " + question);
  prompt.context = std::move(context);
  prompt.question = std::move(question);
  return prompt;
}

double PolicyModel::sequence_logprob(const PromptContext& prompt,
                                     const std::vector<int>& seq) const {
  double total = 0.0;
  std::vector<int> prefix;
  prefix.reserve(seq.size());
  for (int token : seq) {
    std::vector<double> dist = next_dist(prompt, prefix);
    double p = dist.at(token);
    total += std::log(p);
    prefix.push_back(token);
  }
  return total;
}

void PolicyModel::mle_update(const std::vector<TrainSequence>& batch,
                             double learning_rate) {
  std::vector<WeightedSequence> weighted;
  weighted.reserve(batch.size());
  for (const TrainSequence& seq : batch) {
    weighted.push_back(WeightedSequence{seq.prompt, seq.tokens, 1.0});
  }
  reinforce_update(weighted, learning_rate);
}

namespace {

FeatureId fnv1a(std::initializer_list<std::string_view> parts) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](char c) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  };
  for (std::string_view part : parts) {
    for (char c : part) mix(c);
    mix('\x1f');
  }
  return h;
}

constexpr std::string_view kBoundary = "<bos>";

}  // namespace

LogLinearPolicy::LogLinearPolicy(Vocabulary vocab, LogLinearOptions options)
    : vocab_(std::move(vocab)), options_(options) {}

std::vector<FeatureId> LogLinearPolicy::features(const PromptContext& prompt,
                                                 const std::vector<int>& prefix,
                                                 int candidate) const {
  const std::string& cand = vocab_.token(candidate);
  std::string_view prev1 =
      prefix.empty() ? kBoundary : std::string_view(vocab_.token(prefix.back()));
  std::string_view prev2 = prefix.size() < 2
                               ? kBoundary
                               : std::string_view(vocab_.token(prefix[prefix.size() - 2]));
  int bucket = static_cast<int>(prefix.size());
  if (bucket > options_.max_position_bucket) bucket = options_.max_position_bucket;
  std::string bucket_str = std::to_string(bucket);

  std::vector<FeatureId> ids;
  ids.reserve(5);
  ids.push_back(fnv1a({"u", cand}));
  ids.push_back(fnv1a({"b", prev1, cand}));
  ids.push_back(fnv1a({"t", prev2, prev1, cand}));
  ids.push_back(fnv1a({"p", bucket_str, cand}));

  bool in_prompt = false;
  if (vocab_.is_copy_slot(candidate)) {
    in_prompt =
        vocab_.copy_slot_index(candidate) < static_cast<int>(prompt.numbers.size());
  } else if (is_number_token(cand)) {
    in_prompt = std::find(prompt.numbers.begin(), prompt.numbers.end(), cand) !=
                prompt.numbers.end();
  }
  if (in_prompt) {
    ids.push_back(fnv1a({"c"}));  // shared copy-from-prompt indicator
  }
  return ids;
}

std::vector<double> LogLinearPolicy::scores(const PromptContext& prompt,
                                            const std::vector<int>& prefix) const {
  const int vocab_size = static_cast<int>(vocab_.size());
  std::vector<double> out(vocab_size, -std::numeric_limits<double>::infinity());
  for (int v = 0; v < vocab_size; ++v) {
    if (v == vocab_.bos()) continue;  // never generated
    if (vocab_.is_copy_slot(v) &&
        vocab_.copy_slot_index(v) >= static_cast<int>(prompt.numbers.size())) {
      continue;  // slot refers to a number this prompt does not have
    }
    double score = 0.0;
    for (FeatureId id : features(prompt, prefix, v)) {
      auto it = weights_.find(id);
      if (it != weights_.end()) score += it->second;
    }
    out[v] = score;
  }
  return out;
}

std::vector<double> LogLinearPolicy::next_dist(const PromptContext& prompt,
                                               const std::vector<int>& prefix) const {
  std::vector<double> s = scores(prompt, prefix);
  double max_score = -std::numeric_limits<double>::infinity();
  for (double x : s) max_score = std::max(max_score, x);
  double sum = 0.0;
  for (double& x : s) {
    x = std::isinf(x) ? 0.0 : std::exp(x - max_score);
    sum += x;
  }
  for (double& x : s) x /= sum;
  return s;
}

SparseVector LogLinearPolicy::sequence_logprob_gradient(
    const PromptContext& prompt, const std::vector<int>& seq) const {
  SparseVector grad;
  std::vector<int> prefix;
  prefix.reserve(seq.size());
  for (int token : seq) {
    std::vector<double> dist = next_dist(prompt, prefix);
    if (!(dist.at(token) > 0.0)) {
      throw std::invalid_argument(
          "sequence contains a token unavailable under this prompt");
    }
    for (FeatureId id : features(prompt, prefix, token)) {
      grad[id] += 1.0;
    }
    for (int v = 0; v < static_cast<int>(dist.size()); ++v) {
      if (dist[v] <= 0.0) continue;
      for (FeatureId id : features(prompt, prefix, v)) {
        grad[id] -= dist[v];
      }
    }
    prefix.push_back(token);
  }
  return grad;
}

void LogLinearPolicy::reinforce_update(const std::vector<WeightedSequence>& batch,
                                       double learning_rate) {
  if (batch.empty()) return;
  SparseVector grad;
  for (const WeightedSequence& ws : batch) {
    if (ws.weight == 0.0) continue;  // contributes nothing
    SparseVector g = sequence_logprob_gradient(ws.prompt, ws.tokens);
    for (const auto& [id, value] : g) {
      grad[id] += ws.weight * value;
    }
  }
  const double scale = learning_rate / static_cast<double>(batch.size());
  for (const auto& [id, value] : grad) {
    if (value != 0.0) weights_[id] += scale * value;
  }
}

std::unique_ptr<PolicyModel> LogLinearPolicy::clone() const {
  return std::make_unique<LogLinearPolicy>(*this);
}

double LogLinearPolicy::weight(FeatureId id) const {
  auto it = weights_.find(id);
  return it == weights_.end() ? 0.0 : it->second;
}

void LogLinearPolicy::set_weight(FeatureId id, double value) {
  weights_[id] = value;
}

std::vector<BeamCandidate> beam_search(const PolicyModel& model,
                                       const PromptContext& prompt,
                                       int beam_width, int n_return,
                                       int max_len) {
  if (n_return < 1 || beam_width < n_return) {
    throw std::invalid_argument("beam_search: need beam_width >= n_return >= 1");
  }
  if (max_len < 1) {
    throw std::invalid_argument("beam_search: need max_len >= 1");
  }
  const int eos = model.vocab().eos();

  auto better = [](const BeamCandidate& a, const BeamCandidate& b) {
    if (a.logprob != b.logprob) return a.logprob > b.logprob;
    if (a.token_ids != b.token_ids) return a.token_ids < b.token_ids;
    return a.finished && !b.finished;
  };

  std::vector<BeamCandidate> beam{BeamCandidate{}};
  for (int step = 0; step < max_len; ++step) {
    std::vector<BeamCandidate> next;
    bool expanded = false;
    for (const BeamCandidate& cand : beam) {
      if (cand.finished ||
          static_cast<int>(cand.token_ids.size()) >= max_len) {
        next.push_back(cand);
        continue;
      }
      std::vector<double> dist = model.next_dist(prompt, cand.token_ids);
      bool has_child = false;
      for (int v = 0; v < static_cast<int>(dist.size()); ++v) {
        if (dist[v] <= 0.0) continue;
        has_child = true;
        BeamCandidate child;
        child.token_ids = cand.token_ids;
        child.logprob = cand.logprob + std::log(dist[v]);
        if (v == eos) {
          child.finished = true;
        } else {
          child.token_ids.push_back(v);
        }
        next.push_back(std::move(child));
      }
      if (has_child) {
        expanded = true;
      } else {
        next.push_back(cand);
      }
    }
    std::sort(next.begin(), next.end(), better);
    if (static_cast<int>(next.size()) > beam_width) {
      next.resize(static_cast<std::size_t>(beam_width));
    }
    beam = std::move(next);
    if (!expanded) break;
  }

  std::sort(beam.begin(), beam.end(), better);
  if (static_cast<int>(beam.size()) > n_return) {
    beam.resize(static_cast<std::size_t>(n_return));
  }
  return beam;
}

std::string render_program(const Vocabulary& vocab, const PromptContext& prompt,
                           const std::vector<int>& token_ids) {
  std::vector<std::string> pieces;
  pieces.reserve(token_ids.size());
  for (int id : token_ids) {
    if (id == vocab.bos() || id == vocab.eos()) continue;
    std::optional<std::string> surface = vocab.surface(id, prompt.numbers);
    // an unresolvable copy slot keeps its raw spelling and fails parsing
    pieces.push_back(surface ? std::move(*surface) : vocab.token(id));
  }

  auto ends_atom = [](const std::string& tok) {
    return tok == ")" || is_number_token(tok) || is_identifier_token(tok);
  };

  std::string out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    bool attach = false;
    if (i > 0 && pieces[i - 1] == "-" && is_number_token(pieces[i])) {
      // minus in expression-start position negates the literal
      attach = i < 2 || !ends_atom(pieces[i - 2]);
    }
    if (!out.empty() && !attach) out += ' ';
    out += pieces[i];
  }
  return out;
}

MleReport mle_pretrain(PolicyModel& model, const std::vector<TrainSequence>& dataset,
                       int epochs, double learning_rate) {
  if (dataset.empty()) {
    throw std::invalid_argument("mle_pretrain: dataset is empty");
  }

  auto mean_nll = [&]() {
    double total = 0.0;
    for (const TrainSequence& seq : dataset) {
      total -= model.sequence_logprob(seq.prompt, seq.tokens);
    }
    return total / static_cast<double>(dataset.size());
  };

  MleReport report;
  report.initial_nll = mean_nll();
  double previous = report.initial_nll;
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    model.mle_update(dataset, learning_rate);
    double current = mean_nll();
    report.epoch_nll.push_back(current);
    if (current > previous * 1.10) {
      throw std::runtime_error(
          "mle_pretrain diverged at epoch " + std::to_string(epoch) + ": NLL " +
          std::to_string(previous) + " -> " + std::to_string(current) +
          "; lower the learning rate");
    }
    previous = current;
  }
  return report;
}

double loglinear_gradient_check(const LogLinearPolicy& model,
                                const PromptContext& prompt,
                                const std::vector<int>& seq, double fd_step) {
  LogLinearPolicy probe = model;
  SparseVector analytic = probe.sequence_logprob_gradient(prompt, seq);

  double max_rel = 0.0;
  for (const auto& [id, grad] : analytic) {
    double original = probe.weight(id);
    probe.set_weight(id, original + fd_step);
    double up = probe.sequence_logprob(prompt, seq);
    probe.set_weight(id, original - fd_step);
    double down = probe.sequence_logprob(prompt, seq);
    probe.set_weight(id, original);
    double fd = (up - down) / (2.0 * fd_step);
    double denom = std::max({std::abs(grad), std::abs(fd), 1.0});
    max_rel = std::max(max_rel, std::abs(grad - fd) / denom);
  }
  return max_rel;
}

namespace {

constexpr const char* kCheckpointMagic = "simdsl-policy";
constexpr int kCheckpointVersion = 1;

}  // namespace

nlohmann::json checkpoint_to_json(const LogLinearPolicy& model) {
  nlohmann::json weights = nlohmann::json::object();
  for (const auto& [id, value] : model.weights()) {
    weights[std::to_string(id)] = value;
  }
  return nlohmann::json{
      {"magic", kCheckpointMagic},
      {"version", kCheckpointVersion},
      {"vocabulary", model.vocab().to_json()},
      {"options", {{"max_position_bucket", model.options().max_position_bucket}}},
      {"weights", std::move(weights)}};
}

LogLinearPolicy checkpoint_from_json(const nlohmann::json& j) {
  if (!j.contains("magic") || j.at("magic").get<std::string>() != kCheckpointMagic) {
    throw std::runtime_error("checkpoint: bad magic header");
  }
  if (j.at("version").get<int>() != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " +
                             j.at("version").dump());
  }
  Vocabulary vocab = Vocabulary::from_json(j.at("vocabulary"));
  LogLinearOptions options;
  options.max_position_bucket =
      j.at("options").at("max_position_bucket").get<int>();
  LogLinearPolicy model(std::move(vocab), options);
  for (const auto& [key, value] : j.at("weights").items()) {
    model.set_weight(std::stoull(key), value.get<double>());
  }
  return model;
}

void save_checkpoint(const LogLinearPolicy& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open checkpoint file for writing: " + path);
  }
  out << checkpoint_to_json(model).dump(2) << '\n';
}

LogLinearPolicy load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open checkpoint file: " + path);
  }
  nlohmann::json j;
  in >> j;
  return checkpoint_from_json(j);
}

}  // namespace simdsl
