#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shiftprobe/cipher.hpp"
#include "shiftprobe/scorer.hpp"
#include "shiftprobe/tokenizer.hpp"

namespace shiftprobe {

// A candidate plaintext: 7 letters, 2 tokens in the quoted-word context,
// with its conditional log probability and probability bin (1 = highest).
struct WordRecord {
    std::string word;
    double logprob = 0.0;
    int bin = 0;
    std::string split;  // "eval" or "heldout"; empty before split_bins
};

// Per-shift corpus frequencies, loaded from `shift,frequency` CSV.
class FrequencyTable {
  public:
    static FrequencyTable from_csv(const std::string& path);
    static FrequencyTable from_pairs(const std::vector<std::pair<int, double>>& entries);

    double raw(int shift) const;         // 0 for missing shifts
    double normalized(int shift) const;  // raw / sum, sums to 1 over 1..25
    int argmax() const;
    double max_normalized() const;

  private:
    std::map<int, double> freq_;
    double total_ = 0.0;
};

// All (3-letter word-initial token + 4-letter non-word-initial token)
// concatenations that re-verify as exactly 2 tokens in the quoted-word
// context. Deduplicated, lexicographic.
std::vector<std::string> enumerate_candidates(const BpeTokenizer& tokenizer);

// Drops blocklisted words. The blocklist file holds one word per line and
// ships empty.
std::vector<std::string> apply_blocklist(std::vector<std::string> words,
                                         const std::string& blocklist_path);

double score_word(const ScorerClient& scorer, const std::string& word);

// Scores words with bounded fan-out; results keep input order.
std::vector<std::pair<std::string, double>> score_words(const ScorerClient& scorer,
                                                        const std::vector<std::string>& words,
                                                        int concurrency = 4);

// Five equidistant log-probability centers between max and min; each center
// greedily takes the per_bin nearest unused words (ties by word). Bin 1 is
// the highest-probability center.
std::vector<WordRecord> bin_words(const std::vector<std::pair<std::string, double>>& scored,
                                  int n_bins = 5, int per_bin = 150);

// Within each bin (descending logprob, ties by word): first eval_n -> eval,
// remaining heldout_n -> heldout.
std::vector<WordRecord> split_bins(std::vector<WordRecord> records, int eval_n = 100,
                                   int heldout_n = 50);

// One CipherExample per (record, shift); ids are content-derived.
std::vector<CipherExample> build_examples(const std::vector<WordRecord>& records,
                                          const std::vector<int>& shifts);

FrequencyTable load_frequency_table(const std::string& path);

// JSONL persistence.
void write_words_jsonl(const std::string& path, const std::vector<WordRecord>& records);
std::vector<WordRecord> read_words_jsonl(const std::string& path);
void write_examples_jsonl(const std::string& path, const std::vector<CipherExample>& examples);
std::vector<CipherExample> read_examples_jsonl(const std::string& path);

}  // namespace shiftprobe
