#include "shiftprobe/scorer.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "shiftprobe/errors.hpp"

namespace shiftprobe {

namespace {

constexpr char kBoundary = '^';   // start-of-word padding
constexpr char kEndSymbol = '$';  // end of word; the closing quote's stand-in

void require_letters(const std::string& word) {
    if (word.empty()) throw ScorerProtocolError("cannot score an empty word");
    for (char c : word) {
        if (c < 'a' || c > 'z') {
            throw ScorerProtocolError("scorer protocol expects lowercase letters, got: " + word);
        }
    }
}

}  // namespace

NgramScorer NgramScorer::train_from_file(const std::string& path, int order, double smoothing) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open frequency list: " + path);
    std::vector<std::pair<std::string, double>> words;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string word;
        double count = 1.0;
        ss >> word;
        if (!(ss >> count)) count = 1.0;
        for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        bool ok = !word.empty();
        for (char c : word) ok = ok && c >= 'a' && c <= 'z';
        if (ok && count > 0) words.emplace_back(word, count);
    }
    return train(words, order, smoothing);
}

NgramScorer NgramScorer::train(const std::vector<std::pair<std::string, double>>& weighted_words,
                               int order, double smoothing) {
    if (order < 1) throw Error("n-gram order must be >= 1");
    NgramScorer s(order, smoothing);
    for (const auto& [word, weight] : weighted_words) {
        std::string padded(static_cast<std::size_t>(order - 1), kBoundary);
        padded += word;
        padded += kEndSymbol;
        for (std::size_t i = static_cast<std::size_t>(order - 1); i < padded.size(); ++i) {
            std::string ctx = padded.substr(i - static_cast<std::size_t>(order - 1),
                                            static_cast<std::size_t>(order - 1));
            s.counts_[ctx + padded[i]] += weight;
            s.context_totals_[ctx] += weight;
        }
    }
    return s;
}

double NgramScorer::score_word(const std::string& word) const {
    require_letters(word);
    std::string padded(static_cast<std::size_t>(order_ - 1), kBoundary);
    padded += word;
    padded += kEndSymbol;
    // 27 outcomes per context: a-z plus the end symbol.
    const double vocab_size = 27.0;
    double logprob = 0.0;
    for (std::size_t i = static_cast<std::size_t>(order_ - 1); i < padded.size(); ++i) {
        std::string ctx = padded.substr(i - static_cast<std::size_t>(order_ - 1),
                                        static_cast<std::size_t>(order_ - 1));
        auto cit = counts_.find(ctx + padded[i]);
        double c = cit == counts_.end() ? 0.0 : cit->second;
        auto tit = context_totals_.find(ctx);
        double t = tit == context_totals_.end() ? 0.0 : tit->second;
        logprob += std::log((c + smoothing_) / (t + smoothing_ * vocab_size));
    }
    if (!std::isfinite(logprob)) throw ScorerProtocolError("non-finite n-gram score for " + word);
    return logprob;
}

double UniformScorer::score_word(const std::string& word) const {
    require_letters(word);
    return static_cast<double>(word.size() + 1) * std::log(1.0 / 26.0);
}

HttpScorer::HttpScorer(std::string base_url, std::string score_path)
    : base_url_(std::move(base_url)), score_path_(std::move(score_path)) {}

double HttpScorer::text_logprob(const std::string& text) const {
    httplib::Client client(base_url_);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    nlohmann::json body{{"text", text}};
    auto res = client.Post(score_path_, body.dump(), "application/json");
    if (!res) throw ScorerUnavailable("scorer endpoint unreachable: " + base_url_);
    if (res->status != 200) {
        throw ScorerUnavailable("scorer returned HTTP " + std::to_string(res->status));
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(res->body);
    } catch (const std::exception& e) {
        throw ScorerProtocolError(std::string("scorer response is not JSON: ") + e.what());
    }
    if (!j.contains("logprob") || !j["logprob"].is_number()) {
        throw ScorerProtocolError("scorer response missing numeric 'logprob'");
    }
    double v = j["logprob"].get<double>();
    if (!std::isfinite(v)) throw ScorerProtocolError("scorer returned non-finite logprob");
    return v;
}

double HttpScorer::score_word(const std::string& word) const {
    require_letters(word);
    double full = text_logprob("The word is \"" + word + "\"");
    double prefix = text_logprob("The word is \"");
    return full - prefix;
}

std::unique_ptr<ScorerClient> make_scorer(const std::string& kind,
                                          const std::string& frequency_list_path,
                                          const std::string& base_url,
                                          const std::string& score_path) {
    if (kind == "ngram") {
        return std::make_unique<NgramScorer>(NgramScorer::train_from_file(frequency_list_path));
    }
    if (kind == "uniform") return std::make_unique<UniformScorer>();
    if (kind == "http") return std::make_unique<HttpScorer>(base_url, score_path);
    throw ConfigError("unknown scorer kind: " + kind);
}

}  // namespace shiftprobe
