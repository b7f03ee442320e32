#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace shiftprobe {

// Conditional word scorer: logP(`The word is "WORD"`) - logP(`The word is "`),
// i.e. the log probability of the word plus its closing quote given the
// quoted-word context. Scoring the same word twice yields identical values.
class ScorerClient {
  public:
    virtual ~ScorerClient() = default;
    virtual double score_word(const std::string& word) const = 0;
    virtual bool deterministic() const { return true; }
    virtual std::string id() const = 0;
};

// Character n-gram model trained from a bundled `word[ count]` frequency
// list. The end-of-word symbol stands in for the closing quote, so scores
// follow the conditional protocol without a neural scorer.
class NgramScorer final : public ScorerClient {
  public:
    static NgramScorer train_from_file(const std::string& frequency_list_path, int order = 3,
                                       double smoothing = 0.5);
    static NgramScorer train(const std::vector<std::pair<std::string, double>>& weighted_words,
                             int order = 3, double smoothing = 0.5);

    double score_word(const std::string& word) const override;
    std::string id() const override { return "ngram-" + std::to_string(order_); }

  private:
    NgramScorer(int order, double smoothing) : order_(order), smoothing_(smoothing) {}

    int order_;
    double smoothing_;
    std::unordered_map<std::string, double> context_totals_;
    std::unordered_map<std::string, double> counts_;  // context + next char
};

// Every letter (and the closing quote) uniform over the 26-letter alphabet:
// score(word) = (len + 1) * log(1/26). Useful as an analytic reference.
class UniformScorer final : public ScorerClient {
  public:
    double score_word(const std::string& word) const override;
    std::string id() const override { return "uniform"; }
};

// Client for a remote token-logprob endpoint:
//   POST {score_path} {"text": "..."} -> {"logprob": x}
// score_word makes the two protocol calls and returns the difference.
class HttpScorer final : public ScorerClient {
  public:
    HttpScorer(std::string base_url, std::string score_path = "/score");

    double score_word(const std::string& word) const override;
    std::string id() const override { return "http:" + base_url_; }

    double text_logprob(const std::string& text) const;

  private:
    std::string base_url_;
    std::string score_path_;
};

std::unique_ptr<ScorerClient> make_scorer(const std::string& kind,
                                          const std::string& frequency_list_path,
                                          const std::string& base_url,
                                          const std::string& score_path);

}  // namespace shiftprobe
