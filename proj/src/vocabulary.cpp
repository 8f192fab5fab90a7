#include "simdsl/vocabulary.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace simdsl {

namespace {

constexpr const char* kBos = "<bos>";
constexpr const char* kEos = "<eos>";
constexpr const char* kUnk = "<unk>";

const std::vector<std::string>& core_tokens() {
  static const std::vector<std::string> core = {
      "func", "simulation", "repeat", "if", "return",
      "(", ")", "{", "}", ";",
      "=", "+", "-", "*", "/", "//",
      "<", ">", ">=", "<=", "!=", "==",
  };
  return core;
}

std::string copy_token(int k) { return "<copy:" + std::to_string(k) + ">"; }

}  // namespace

bool is_identifier_token(const std::string& token) {
  if (token.empty()) return false;
  char first = token[0];
  if (!((first >= 'a' && first <= 'z') || (first >= 'A' && first <= 'Z'))) {
    return false;
  }
  for (char c : token) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return token != "func" && token != "simulation" && token != "repeat" &&
         token != "if" && token != "return";
}

bool is_number_token(const std::string& token) {
  if (token.empty()) return false;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : token) {
    if (c >= '0' && c <= '9') {
      seen_digit = true;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      return false;
    }
  }
  return seen_digit && token[0] != '.' && token.back() != '.';
}

std::vector<std::string> extract_numbers(const std::string& text) {
  std::vector<std::string> numbers;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (text[i] >= '0' && text[i] <= '9') {
      std::size_t begin = i;
      while (i < n && text[i] >= '0' && text[i] <= '9') ++i;
      if (i + 1 < n && text[i] == '.' && text[i + 1] >= '0' && text[i + 1] <= '9') {
        ++i;
        while (i < n && text[i] >= '0' && text[i] <= '9') ++i;
      }
      std::string lexeme = text.substr(begin, i - begin);
      if (std::find(numbers.begin(), numbers.end(), lexeme) == numbers.end()) {
        numbers.push_back(lexeme);
      }
    } else {
      ++i;
    }
  }
  return numbers;
}

Vocabulary Vocabulary::build(
    const std::vector<std::vector<std::string>>& program_token_seqs,
    const VocabularyOptions& options) {
  // frequency-then-name order keeps the harvested pools deterministic
  std::map<std::string, std::size_t> identifier_freq;
  std::map<std::string, std::size_t> literal_freq;
  for (const auto& seq : program_token_seqs) {
    for (const std::string& token : seq) {
      if (is_number_token(token)) {
        ++literal_freq[token];
      } else if (is_identifier_token(token)) {
        ++identifier_freq[token];
      }
    }
  }

  auto take_top = [](const std::map<std::string, std::size_t>& freq,
                     std::size_t limit) {
    std::vector<std::pair<std::string, std::size_t>> items(freq.begin(),
                                                           freq.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (items.size() > limit) items.resize(limit);
    std::vector<std::string> out;
    out.reserve(items.size());
    for (auto& [token, count] : items) out.push_back(token);
    std::sort(out.begin(), out.end());
    return out;
  };

  Vocabulary vocab;
  vocab.tokens_ = core_tokens();
  for (const std::string& ident : take_top(identifier_freq, options.max_identifiers)) {
    vocab.tokens_.push_back(ident);
  }
  for (const std::string& lit : take_top(literal_freq, options.max_literals)) {
    vocab.tokens_.push_back(lit);
  }
  vocab.bos_ = static_cast<int>(vocab.tokens_.size());
  vocab.tokens_.push_back(kBos);
  vocab.eos_ = static_cast<int>(vocab.tokens_.size());
  vocab.tokens_.push_back(kEos);
  vocab.unk_ = static_cast<int>(vocab.tokens_.size());
  vocab.tokens_.push_back(kUnk);
  vocab.copy_begin_ = static_cast<int>(vocab.tokens_.size());
  vocab.copy_count_ = static_cast<int>(options.copy_slots);
  for (int k = 0; k < vocab.copy_count_; ++k) {
    vocab.tokens_.push_back(copy_token(k));
  }
  vocab.rebuild_index();
  return vocab;
}

void Vocabulary::rebuild_index() {
  index_.clear();
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    index_[tokens_[i]] = static_cast<int>(i);
  }
}

std::optional<int> Vocabulary::lookup(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> Vocabulary::encode(
    const std::vector<std::string>& program_tokens,
    const std::vector<std::string>& prompt_numbers) const {
  std::vector<int> ids;
  ids.reserve(program_tokens.size());
  for (const std::string& token : program_tokens) {
    if (is_number_token(token)) {
      auto it = std::find(prompt_numbers.begin(), prompt_numbers.end(), token);
      if (it != prompt_numbers.end()) {
        int k = static_cast<int>(it - prompt_numbers.begin());
        if (k < copy_count_) {
          ids.push_back(copy_slot(k));
          continue;
        }
      }
    }
    std::optional<int> id = lookup(token);
    ids.push_back(id.value_or(unk_));
  }
  return ids;
}

std::optional<std::string> Vocabulary::surface(
    int id, const std::vector<std::string>& prompt_numbers) const {
  if (id == bos_ || id == eos_) return std::nullopt;
  if (is_copy_slot(id)) {
    int k = copy_slot_index(id);
    if (k >= static_cast<int>(prompt_numbers.size())) return std::nullopt;
    return prompt_numbers[k];
  }
  return tokens_.at(id);
}

double Vocabulary::unk_rate(
    const std::vector<std::vector<std::string>>& program_token_seqs,
    const std::vector<std::vector<std::string>>& prompt_numbers) const {
  if (program_token_seqs.size() != prompt_numbers.size()) {
    throw std::invalid_argument("unk_rate: mismatched corpus sizes");
  }
  std::size_t total = 0;
  std::size_t unk = 0;
  for (std::size_t i = 0; i < program_token_seqs.size(); ++i) {
    for (int id : encode(program_token_seqs[i], prompt_numbers[i])) {
      ++total;
      if (id == unk_) ++unk;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(unk) / static_cast<double>(total);
}

nlohmann::json Vocabulary::to_json() const {
  return nlohmann::json{{"tokens", tokens_},
                        {"bos", bos_},
                        {"eos", eos_},
                        {"unk", unk_},
                        {"copy_begin", copy_begin_},
                        {"copy_count", copy_count_}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  Vocabulary vocab;
  vocab.tokens_ = j.at("tokens").get<std::vector<std::string>>();
  vocab.bos_ = j.at("bos").get<int>();
  vocab.eos_ = j.at("eos").get<int>();
  vocab.unk_ = j.at("unk").get<int>();
  vocab.copy_begin_ = j.at("copy_begin").get<int>();
  vocab.copy_count_ = j.at("copy_count").get<int>();
  vocab.rebuild_index();
  return vocab;
}

}  // namespace simdsl
