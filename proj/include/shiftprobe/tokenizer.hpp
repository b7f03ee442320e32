#pragma once

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace shiftprobe {

// Byte-pair tokenizer driven by a vocabulary file (JSON token -> id) and an
// ordered merges file. A token whose string starts with the word-boundary
// marker (GPT-2 style "Ġ") is word-initial; tokenizing a word in the
// `The word is "` scoring context means tokenizing it bare, since the quote
// leaves no leading boundary.
//
// Input domain is lowercase letters and spaces.
class BpeTokenizer {
  public:
    static BpeTokenizer load(const std::string& vocab_path, const std::string& merges_path,
                             std::string marker = "\xC4\xA0");

    static BpeTokenizer from_memory(std::map<std::string, int> vocab,
                                    std::vector<std::pair<std::string, std::string>> merges,
                                    std::string marker = "\xC4\xA0");

    // BPE over one whitespace-free piece; word_initial prepends the marker.
    std::vector<int> tokenize_piece(std::string_view piece, bool word_initial) const;

    // Splits on single spaces; pieces after a space are word-initial.
    std::vector<int> tokenize_text(std::string_view text) const;

    std::string detokenize(const std::vector<int>& ids) const;

    // Token count of a word immediately after the opening quote of
    // `The word is "` - i.e. of the bare word.
    std::size_t token_count_in_quote_context(std::string_view word) const;

    const std::map<std::string, int>& vocabulary() const { return vocab_; }
    const std::string& marker() const { return marker_; }

  private:
    BpeTokenizer() = default;

    std::map<std::string, int> vocab_;  // stable iteration order
    std::unordered_map<int, std::string> id_to_token_;
    std::unordered_map<std::string, int> merge_rank_;  // "left\x01right" -> rank
    std::string marker_;
};

}  // namespace shiftprobe
