#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace simdsl {

// Numbers appearing in a prompt text, in order of first appearance,
// deduplicated by lexeme. These back the copy slots.
std::vector<std::string> extract_numbers(const std::string& text);

// True for int/real literal lexemes ("12", "3.50").
bool is_number_token(const std::string& token);

// True for tokens shaped like identifiers (and not keywords).
bool is_identifier_token(const std::string& token);

struct VocabularyOptions {
  std::size_t max_identifiers = 64;
  std::size_t max_literals = 256;
  std::size_t copy_slots = 12;
};

// Closed token inventory for the decoder: DSL keywords, operators and
// punctuation, an identifier pool and literal tokens harvested from the
// training programs, BOS/EOS/UNK, and copy slots that reference the k-th
// number appearing in the prompt.
class Vocabulary {
 public:
  Vocabulary() = default;

  static Vocabulary build(
      const std::vector<std::vector<std::string>>& program_token_seqs,
      const VocabularyOptions& options = {});

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(int id) const { return tokens_.at(id); }
  std::optional<int> lookup(const std::string& token) const;

  int bos() const { return bos_; }
  int eos() const { return eos_; }
  int unk() const { return unk_; }

  int copy_slot_count() const { return copy_count_; }
  int copy_slot(int k) const { return copy_begin_ + k; }
  bool is_copy_slot(int id) const {
    return id >= copy_begin_ && id < copy_begin_ + copy_count_;
  }
  int copy_slot_index(int id) const { return id - copy_begin_; }

  // Encodes a program token sequence. Literals that appear among the
  // prompt's numbers map to their copy slot (reference programs reuse the
  // question's quantities); everything else resolves directly or to UNK.
  std::vector<int> encode(const std::vector<std::string>& program_tokens,
                          const std::vector<std::string>& prompt_numbers) const;

  // Surface form of a token id under a prompt. Copy slots resolve to the
  // prompt's numbers; BOS/EOS have no surface; an out-of-range copy slot
  // has none either.
  std::optional<std::string> surface(
      int id, const std::vector<std::string>& prompt_numbers) const;

  // Fraction of tokens encoding to UNK across a corpus.
  double unk_rate(
      const std::vector<std::vector<std::string>>& program_token_seqs,
      const std::vector<std::vector<std::string>>& prompt_numbers) const;

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);

 private:
  void rebuild_index();

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  int bos_ = -1;
  int eos_ = -1;
  int unk_ = -1;
  int copy_begin_ = -1;
  int copy_count_ = 0;
};

}  // namespace simdsl
