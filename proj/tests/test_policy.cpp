#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "simdsl/harness.hpp"
#include "simdsl/lexer.hpp"
#include "simdsl/policy.hpp"
#include "simdsl/synthetic.hpp"
#include "simdsl/vocabulary.hpp"

using namespace simdsl;

namespace {

// Deterministic policy for harness tests: all probability mass follows one
// scripted token sequence, then EOS.
class ScriptedPolicy final : public PolicyModel {
 public:
  ScriptedPolicy(Vocabulary vocab, std::vector<int> script)
      : vocab_(std::move(vocab)), script_(std::move(script)) {}

  const Vocabulary& vocab() const override { return vocab_; }

  std::vector<double> next_dist(const PromptContext&,
                                const std::vector<int>& prefix) const override {
    std::vector<double> dist(vocab_.size(), 0.0);
    bool on_script = prefix.size() <= script_.size();
    for (std::size_t i = 0; on_script && i < prefix.size(); ++i) {
      if (prefix[i] != script_[i]) on_script = false;
    }
    if (on_script && prefix.size() < script_.size()) {
      dist[static_cast<std::size_t>(script_[prefix.size()])] = 1.0;
    } else {
      dist[static_cast<std::size_t>(vocab_.eos())] = 1.0;
    }
    return dist;
  }

  void reinforce_update(const std::vector<WeightedSequence>&, double) override {}

  std::unique_ptr<PolicyModel> clone() const override {
    return std::make_unique<ScriptedPolicy>(*this);
  }

 private:
  Vocabulary vocab_;
  std::vector<int> script_;
};

Vocabulary small_vocab() {
  std::vector<std::vector<std::string>> seqs = {
      program_tokens("func simulation() { x = 5; y = 3.5; return x; }").tokens,
      program_tokens("func simulation() { acc = 0; repeat(4) { acc = acc + 2; } "
                     "return acc; }")
          .tokens,
  };
  return Vocabulary::build(seqs);
}

std::vector<int> encode_program(const Vocabulary& vocab, const PromptContext& prompt,
                                const std::string& source, bool with_eos = true) {
  TokenStringsResult tokens = program_tokens(source);
  REQUIRE(tokens.ok());
  std::vector<int> ids = vocab.encode(tokens.tokens, prompt.numbers);
  if (with_eos) ids.push_back(vocab.eos());
  return ids;
}

}  // namespace

TEST_CASE("extract_numbers walks the text in order and deduplicates") {
  CHECK(extract_numbers("heat 80 for 20 minutes, then 80 again at 0.5 rate") ==
        std::vector<std::string>{"80", "20", "0.5"});
  CHECK(extract_numbers("no digits here").empty());
  CHECK(extract_numbers("3.5.2") == std::vector<std::string>{"3.5", "2"});
}

TEST_CASE("vocabulary: core tokens, harvested pools, special ids") {
  Vocabulary vocab = small_vocab();
  CHECK(vocab.lookup("repeat").has_value());
  CHECK(vocab.lookup("//").has_value());
  CHECK(vocab.lookup("acc").has_value());   // harvested identifier
  CHECK(vocab.lookup("3.5").has_value());   // harvested literal
  CHECK_FALSE(vocab.lookup("notthere").has_value());
  CHECK(vocab.copy_slot_count() == 12);
  CHECK(vocab.is_copy_slot(vocab.copy_slot(0)));
  CHECK_FALSE(vocab.is_copy_slot(vocab.eos()));
}

TEST_CASE("vocabulary encode prefers copy slots for prompt numbers") {
  Vocabulary vocab = small_vocab();
  std::vector<std::string> numbers = {"41", "5"};

  std::vector<int> ids = vocab.encode({"x", "=", "5", ";"}, numbers);
  REQUIRE(ids.size() == 4);
  CHECK(ids[2] == vocab.copy_slot(1));  // "5" is the prompt's second number

  // literal known to the vocabulary but absent from the prompt
  ids = vocab.encode({"y", "=", "3.5", ";"}, numbers);
  CHECK(ids[2] == *vocab.lookup("3.5"));

  // unknown literal and unknown identifier degrade to UNK
  ids = vocab.encode({"zz", "=", "777", ";"}, numbers);
  CHECK(ids[0] == vocab.unk());
  CHECK(ids[2] == vocab.unk());

  CHECK(vocab.surface(vocab.copy_slot(1), numbers) == std::string("5"));
  CHECK(vocab.surface(vocab.copy_slot(5), numbers) == std::nullopt);
  CHECK(vocab.surface(vocab.eos(), numbers) == std::nullopt);
}

TEST_CASE("vocabulary unk_rate reports the UNK fraction") {
  Vocabulary vocab = small_vocab();
  std::vector<std::vector<std::string>> seqs = {{"x", "=", "5", ";"},
                                                {"zz", "=", "5", ";"}};
  std::vector<std::vector<std::string>> numbers = {{"5"}, {"5"}};
  CHECK(vocab.unk_rate(seqs, numbers) == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("vocabulary JSON round-trip") {
  Vocabulary vocab = small_vocab();
  Vocabulary back = Vocabulary::from_json(vocab.to_json());
  CHECK(back.size() == vocab.size());
  CHECK(back.eos() == vocab.eos());
  CHECK(back.lookup("acc") == vocab.lookup("acc"));
  CHECK(back.copy_slot_count() == vocab.copy_slot_count());
}

TEST_CASE("next_dist is a distribution with BOS and dead copy slots masked") {
  Vocabulary vocab = small_vocab();
  LogLinearPolicy model(vocab);
  PromptContext prompt = PromptContext::make("mix 5 grams", "how much after 3?");
  REQUIRE(prompt.numbers.size() == 2);

  std::vector<int> prefix;
  for (int step = 0; step < 4; ++step) {
    std::vector<double> dist = model.next_dist(prompt, prefix);
    double sum = 0.0;
    for (double p : dist) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(dist[static_cast<std::size_t>(vocab.bos())] == 0.0);
    CHECK(dist[static_cast<std::size_t>(vocab.copy_slot(2))] == 0.0);
    CHECK(dist[static_cast<std::size_t>(vocab.copy_slot(0))] > 0.0);
    prefix.push_back(*vocab.lookup("func"));
  }
}

TEST_CASE("sequence_logprob is the sum of stepwise log probabilities") {
  Vocabulary vocab = small_vocab();
  LogLinearPolicy model(vocab);
  PromptContext prompt = PromptContext::make("use 5", "what?");
  std::vector<int> seq = encode_program(
      vocab, prompt, "func simulation() { x = 5; return x; }");

  double expected = 0.0;
  std::vector<int> prefix;
  for (int token : seq) {
    expected += std::log(model.next_dist(prompt, prefix)[token]);
    prefix.push_back(token);
  }
  CHECK(model.sequence_logprob(prompt, seq) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
  Vocabulary vocab = small_vocab();
  PromptContext prompt = PromptContext::make("start from 5 then 3.5", "result?");
  LogLinearPolicy model(vocab);
  std::vector<int> seq = encode_program(
      vocab, prompt, "func simulation() { x = 5; y = 3.5; return x; }");

  // zero weights
  CHECK(loglinear_gradient_check(model, prompt, seq) < 1e-4);

  // random weights, three seeds
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    LogLinearPolicy randomized(vocab);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.7);
    for (int token : seq) {
      std::vector<int> prefix;
      for (FeatureId id : randomized.features(prompt, prefix, token)) {
        randomized.set_weight(id, noise(rng));
      }
      prefix.push_back(token);
    }
    CHECK(loglinear_gradient_check(randomized, prompt, seq) < 1e-4);
  }
}

TEST_CASE("softmax over a single available token has zero gradient") {
  // only EOS is generable
  nlohmann::json j = {{"tokens", {"<bos>", "<eos>"}}, {"bos", 0},    {"eos", 1},
                      {"unk", 1},                     {"copy_begin", 2},
                      {"copy_count", 0}};
  Vocabulary tiny = Vocabulary::from_json(j);
  LogLinearPolicy model(tiny);
  PromptContext prompt = PromptContext::make("", "");
  std::vector<int> seq = {tiny.eos()};
  CHECK(model.sequence_logprob(prompt, seq) == 0.0);
  SparseVector grad = model.sequence_logprob_gradient(prompt, seq);
  for (const auto& [id, value] : grad) {
    CHECK(value == 0.0);
  }
}

TEST_CASE("mle_pretrain on a single example memorizes it") {
  Vocabulary vocab = small_vocab();
  PromptContext prompt = PromptContext::make("start at 7 add 2 for 4 cycles", "?");
  std::string source =
      "func simulation() { acc = 7; repeat(4) { acc = acc + 2; } return acc; }";
  std::vector<TrainSequence> data = {{prompt, encode_program(vocab, prompt, source)}};

  LogLinearPolicy model(vocab);
  mle_pretrain(model, data, 60, 1.0);

  std::vector<BeamCandidate> beam = beam_search(model, prompt, 1, 1, 64);
  REQUIRE(beam.size() == 1);
  CHECK(beam[0].finished);
  std::vector<int> want(data[0].tokens.begin(), data[0].tokens.end() - 1);
  CHECK(beam[0].token_ids == want);

  // decoded surface matches the original token for token
  std::string rendered = render_program(vocab, prompt, beam[0].token_ids);
  CHECK(program_tokens(rendered).tokens == program_tokens(source).tokens);
}

TEST_CASE("mle_pretrain lowers NLL from initialization and reports per-epoch values") {
  std::vector<QAExample> corpus = generate_synthetic_corpus(20, Split::Train, 99);
  Vocabulary vocab;
  {
    std::vector<std::vector<std::string>> seqs;
    for (const auto& ex : corpus) {
      seqs.push_back(program_tokens(ex.reference_program).tokens);
    }
    vocab = Vocabulary::build(seqs);
  }
  std::vector<TrainSequence> data = encode_examples(vocab, corpus);

  // gradient sanity on this corpus before trusting the training curve
  LogLinearPolicy probe(vocab);
  CHECK(loglinear_gradient_check(probe, data[0].prompt, data[0].tokens) < 1e-4);

  LogLinearPolicy model(vocab);
  MleReport report = mle_pretrain(model, data, 5, 0.5);
  REQUIRE(report.epoch_nll.size() == 5);
  CHECK(report.epoch_nll[0] < report.initial_nll);
  for (std::size_t e = 1; e < report.epoch_nll.size(); ++e) {
    CHECK(report.epoch_nll[e] <= report.epoch_nll[e - 1] * 1.0000001);
  }
}

TEST_CASE("mle_pretrain rejects an empty dataset and detects divergence") {
  Vocabulary vocab = small_vocab();
  LogLinearPolicy model(vocab);
  CHECK_THROWS_AS(mle_pretrain(model, {}, 3, 0.1), std::invalid_argument);

  // conflicting targets under an absurd learning rate oscillate upward
  PromptContext prompt = PromptContext::make("5 and 7", "?");
  std::vector<TrainSequence> conflict = {
      {prompt, encode_program(vocab, prompt, "func simulation() { x = 5; return x; }")},
      {prompt, encode_program(vocab, prompt, "func simulation() { y = 7; return y; }")},
  };
  LogLinearPolicy diverging(vocab);
  CHECK_THROWS_AS(mle_pretrain(diverging, conflict, 50, 500.0), std::runtime_error);
}

TEST_CASE("beam search: scripted policy returns its program at any width") {
  Vocabulary vocab = small_vocab();
  PromptContext prompt = PromptContext::make("use 5", "?");
  std::vector<int> script =
      encode_program(vocab, prompt, "func simulation() { x = 5; return x; }",
                     /*with_eos=*/false);
  ScriptedPolicy model(vocab, script);

  for (int width : {1, 4, 32}) {
    std::vector<BeamCandidate> beam = beam_search(model, prompt, width, 1, 64);
    REQUIRE(beam.size() == 1);
    CHECK(beam[0].token_ids == script);
    CHECK(beam[0].logprob == 0.0);  // probability one along the script
    CHECK(beam[0].finished);
  }
}

TEST_CASE("beam search width 1 equals greedy decoding") {
  Vocabulary vocab = small_vocab();
  PromptContext prompt = PromptContext::make("start 7 step 2 cycles 4", "?");
  std::vector<TrainSequence> data = {
      {prompt,
       encode_program(vocab, prompt,
                      "func simulation() { acc = 7; repeat(4) { acc = acc + 2; } "
                      "return acc; }")}};
  LogLinearPolicy model(vocab);
  mle_pretrain(model, data, 25, 1.0);

  // manual greedy rollout
  std::vector<int> greedy;
  double greedy_logprob = 0.0;
  bool finished = false;
  for (int step = 0; step < 64 && !finished; ++step) {
    std::vector<double> dist = model.next_dist(prompt, greedy);
    int best = 0;
    for (int v = 1; v < static_cast<int>(dist.size()); ++v) {
      if (dist[v] > dist[best]) best = v;
    }
    greedy_logprob += std::log(dist[best]);
    if (best == vocab.eos()) {
      finished = true;
    } else {
      greedy.push_back(best);
    }
  }

  std::vector<BeamCandidate> beam = beam_search(model, prompt, 1, 1, 64);
  REQUIRE(beam.size() == 1);
  CHECK(beam[0].token_ids == greedy);
  CHECK(beam[0].finished == finished);
  CHECK(beam[0].logprob == doctest::Approx(greedy_logprob).epsilon(1e-12));
}

TEST_CASE("beam search is deterministic and sorted; wider beams never lose") {
  Vocabulary vocab = small_vocab();
  PromptContext prompt = PromptContext::make("7 then 2 then 4", "?");
  std::vector<TrainSequence> data = {
      {prompt, encode_program(vocab, prompt,
                              "func simulation() { x = 7; return x; }")},
      {prompt, encode_program(vocab, prompt,
                              "func simulation() { y = 2; return y; }")}};
  LogLinearPolicy model(vocab);
  mle_pretrain(model, data, 8, 0.5);

  std::vector<BeamCandidate> once = beam_search(model, prompt, 8, 8, 40);
  std::vector<BeamCandidate> twice = beam_search(model, prompt, 8, 8, 40);
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].token_ids == twice[i].token_ids);
    CHECK(once[i].logprob == twice[i].logprob);
  }
  for (std::size_t i = 1; i < once.size(); ++i) {
    CHECK(once[i - 1].logprob >= once[i].logprob);
  }

  double previous_best = -std::numeric_limits<double>::infinity();
  for (int width : {1, 2, 4, 8, 16}) {
    std::vector<BeamCandidate> beam = beam_search(model, prompt, width, 1, 40);
    REQUIRE(!beam.empty());
    CHECK(beam[0].logprob >= previous_best - 1e-12);
    previous_best = beam[0].logprob;
  }

  CHECK_THROWS_AS(beam_search(model, prompt, 2, 4, 40), std::invalid_argument);
  CHECK_THROWS_AS(beam_search(model, prompt, 0, 0, 40), std::invalid_argument);
}

TEST_CASE("render_program reattaches unary minus and resolves copy slots") {
  Vocabulary vocab = small_vocab();
  PromptContext prompt = PromptContext::make("numbers 41 and 5", "?");

  auto render_src = [&](const std::string& source) {
    std::vector<int> ids = encode_program(vocab, prompt, source, false);
    return render_program(vocab, prompt, ids);
  };

  CHECK(render_src("func simulation() { x = -5; return x; }") ==
        "func simulation ( ) { x = -5 ; return x ; }");
  CHECK(render_src("func simulation() { x = 5; y = x - 5; return y; }") ==
        "func simulation ( ) { x = 5 ; y = x - 5 ; return y ; }");
  CHECK(render_src("func simulation() { x = 5; y = x - -5; return y; }") ==
        "func simulation ( ) { x = 5 ; y = x - -5 ; return y ; }");

  // out-of-range copy slot stays raw and cannot parse
  std::vector<int> bad = {*vocab.lookup("return"), vocab.copy_slot(9),
                          *vocab.lookup(";")};
  std::string rendered = render_program(vocab, prompt, bad);
  CHECK(rendered.find("<copy:9>") != std::string::npos);
}

TEST_CASE("reinforce_update with all-zero rewards is a bit-exact no-op") {
  Vocabulary vocab = small_vocab();
  LogLinearPolicy model(vocab);
  PromptContext prompt = PromptContext::make("5", "?");
  std::vector<int> seq = encode_program(vocab, prompt,
                                        "func simulation() { x = 5; return x; }");

  model.set_weight(12345, 0.5);  // some existing state
  SparseVector before = model.weights();
  model.reinforce_update({{prompt, seq, 0.0}, {prompt, seq, 0.0}}, 0.3);
  CHECK(model.weights() == before);
}

TEST_CASE("reinforce with unit weight equals the MLE update bit for bit") {
  Vocabulary vocab = small_vocab();
  PromptContext prompt = PromptContext::make("7 and 2", "?");
  std::vector<int> seq = encode_program(
      vocab, prompt, "func simulation() { x = 7; y = 2; return y; }");

  LogLinearPolicy via_reinforce(vocab);
  LogLinearPolicy via_mle(vocab);
  via_reinforce.reinforce_update({{prompt, seq, 1.0}}, 0.25);
  via_mle.mle_update({{prompt, seq}}, 0.25);

  REQUIRE(via_reinforce.weights().size() == via_mle.weights().size());
  for (const auto& [id, value] : via_mle.weights()) {
    REQUIRE(via_reinforce.weights().count(id) == 1);
    CHECK(via_reinforce.weights().at(id) == value);
  }
}

TEST_CASE("checkpoints round-trip and validate magic/version") {
  Vocabulary vocab = small_vocab();
  LogLinearPolicy model(vocab);
  PromptContext prompt = PromptContext::make("5", "?");
  std::vector<int> seq = encode_program(vocab, prompt,
                                        "func simulation() { x = 5; return x; }");
  model.reinforce_update({{prompt, seq, 0.8}}, 0.5);

  std::string path = "checkpoint_test.json";
  save_checkpoint(model, path);
  LogLinearPolicy loaded = load_checkpoint(path);
  CHECK(loaded.vocab().size() == vocab.size());
  REQUIRE(loaded.weights().size() == model.weights().size());
  for (const auto& [id, value] : model.weights()) {
    CHECK(loaded.weight(id) == value);
  }
  CHECK(loaded.sequence_logprob(prompt, seq) ==
        model.sequence_logprob(prompt, seq));

  nlohmann::json j = checkpoint_to_json(model);
  j["magic"] = "something-else";
  CHECK_THROWS_AS(checkpoint_from_json(j), std::runtime_error);
  j["magic"] = "simdsl-policy";
  j["version"] = 999;
  CHECK_THROWS_AS(checkpoint_from_json(j), std::runtime_error);

  std::remove(path.c_str());
}
