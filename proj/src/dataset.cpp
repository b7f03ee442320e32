#include "shiftprobe/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "shiftprobe/errors.hpp"

namespace shiftprobe {

namespace {

bool all_lower_alpha(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < 'a' || c > 'z') return false;
    }
    return true;
}

}  // namespace

FrequencyTable FrequencyTable::from_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open frequency table: " + path);
    std::vector<std::pair<int, double>> entries;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("shift", 0) == 0) continue;  // header
        }
        std::istringstream ss(line);
        std::string shift_s, freq_s;
        if (!std::getline(ss, shift_s, ',') || !std::getline(ss, freq_s)) {
            throw InvalidFrequency("malformed frequency row: " + line);
        }
        entries.emplace_back(std::stoi(shift_s), std::stod(freq_s));
    }
    return from_pairs(entries);
}

FrequencyTable FrequencyTable::from_pairs(const std::vector<std::pair<int, double>>& entries) {
    FrequencyTable t;
    for (const auto& [shift, freq] : entries) {
        if (shift < 1 || shift > 25) {
            throw InvalidFrequency("shift out of range [1,25]: " + std::to_string(shift));
        }
        if (!(freq >= 0.0) || !std::isfinite(freq)) {
            throw InvalidFrequency("negative or non-finite frequency for shift " +
                                   std::to_string(shift));
        }
        t.freq_[shift] = freq;
        t.total_ += freq;
    }
    if (t.total_ <= 0.0) throw InvalidFrequency("frequency table has no nonzero entry");
    return t;
}

double FrequencyTable::raw(int shift) const {
    auto it = freq_.find(shift);
    return it == freq_.end() ? 0.0 : it->second;
}

double FrequencyTable::normalized(int shift) const { return raw(shift) / total_; }

int FrequencyTable::argmax() const {
    int best = 1;
    double best_f = -1.0;
    for (const auto& [shift, f] : freq_) {
        if (f > best_f) {
            best_f = f;
            best = shift;
        }
    }
    return best;
}

double FrequencyTable::max_normalized() const { return normalized(argmax()); }

std::vector<std::string> enumerate_candidates(const BpeTokenizer& tokenizer) {
    if (tokenizer.vocabulary().empty()) throw EmptyVocabulary("vocabulary is empty");
    const std::string& marker = tokenizer.marker();

    std::vector<std::string> initial3;
    std::vector<std::string> continuation4;
    for (const auto& [token, id] : tokenizer.vocabulary()) {
        (void)id;
        if (token.size() == marker.size() + 3 && token.rfind(marker, 0) == 0 &&
            all_lower_alpha(std::string_view(token).substr(marker.size()))) {
            initial3.push_back(token.substr(marker.size()));
        } else if (token.size() == 4 && all_lower_alpha(token)) {
            continuation4.push_back(token);
        }
    }

    std::set<std::string> words;
    for (const auto& head : initial3) {
        for (const auto& tail : continuation4) {
            std::string word = head + tail;
            if (tokenizer.token_count_in_quote_context(word) == 2) words.insert(word);
        }
    }
    return {words.begin(), words.end()};
}

std::vector<std::string> apply_blocklist(std::vector<std::string> words,
                                         const std::string& blocklist_path) {
    if (blocklist_path.empty()) return words;
    std::ifstream f(blocklist_path);
    if (!f) throw Error("cannot open blocklist: " + blocklist_path);
    std::set<std::string> blocked;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line[0] != '#') blocked.insert(line);
    }
    std::erase_if(words, [&](const std::string& w) { return blocked.count(w) > 0; });
    return words;
}

double score_word(const ScorerClient& scorer, const std::string& word) {
    for (int attempt = 0;; ++attempt) {
        try {
            double v = scorer.score_word(word);
            if (!std::isfinite(v)) throw ScorerProtocolError("non-finite score for " + word);
            return v;
        } catch (const ScorerUnavailable&) {
            if (attempt >= 2) throw;
        }
    }
}

std::vector<std::pair<std::string, double>> score_words(const ScorerClient& scorer,
                                                        const std::vector<std::string>& words,
                                                        int concurrency) {
    std::vector<std::pair<std::string, double>> out(words.size());
    if (words.empty()) return out;
    concurrency = std::clamp<int>(concurrency, 1, static_cast<int>(words.size()));

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= words.size() || failed.load()) break;
            try {
                out[i] = {words[i], score_word(scorer, words[i])};
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) first_error = e.what();
                break;
            }
        }
    };

    std::vector<std::thread> pool;
    for (int t = 0; t < concurrency; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load()) throw ScorerUnavailable("scoring failed: " + first_error);
    return out;
}

std::vector<WordRecord> bin_words(const std::vector<std::pair<std::string, double>>& scored,
                                  int n_bins, int per_bin) {
    const std::size_t needed = static_cast<std::size_t>(n_bins) * static_cast<std::size_t>(per_bin);
    if (scored.size() < needed) {
        throw InsufficientCandidates("need " + std::to_string(needed) + " scored words, have " +
                                     std::to_string(scored.size()));
    }

    std::vector<std::pair<std::string, double>> sorted = scored;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    const double max_lp = sorted.front().second;
    const double min_lp = sorted.back().second;
    std::vector<double> centers(static_cast<std::size_t>(n_bins));
    for (int i = 0; i < n_bins; ++i) {
        centers[static_cast<std::size_t>(i)] =
            n_bins == 1 ? max_lp
                        : max_lp + (min_lp - max_lp) * static_cast<double>(i) /
                              static_cast<double>(n_bins - 1);
    }

    // Greedy per center: bin 1 (highest center) first, each taking the
    // per_bin nearest unassigned words.
    std::vector<bool> used(sorted.size(), false);
    std::vector<WordRecord> records;
    records.reserve(needed);
    for (int b = 0; b < n_bins; ++b) {
        std::vector<std::size_t> order;
        order.reserve(sorted.size());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (!used[i]) order.push_back(i);
        }
        double center = centers[static_cast<std::size_t>(b)];
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
            double da = std::fabs(sorted[a].second - center);
            double dc = std::fabs(sorted[c].second - center);
            if (da != dc) return da < dc;
            return sorted[a].first < sorted[c].first;
        });
        std::vector<std::size_t> chosen(order.begin(),
                                        order.begin() + static_cast<std::ptrdiff_t>(per_bin));
        std::sort(chosen.begin(), chosen.end());  // descending-logprob order within the bin
        for (std::size_t i : chosen) {
            used[i] = true;
            records.push_back(WordRecord{sorted[i].first, sorted[i].second, b + 1, ""});
        }
    }
    return records;
}

std::vector<WordRecord> split_bins(std::vector<WordRecord> records, int eval_n, int heldout_n) {
    std::map<int, std::vector<WordRecord*>> by_bin;
    for (auto& r : records) by_bin[r.bin].push_back(&r);
    for (auto& [bin, rs] : by_bin) {
        if (static_cast<int>(rs.size()) != eval_n + heldout_n) {
            throw SplitSizeMismatch("bin " + std::to_string(bin) + " has " +
                                    std::to_string(rs.size()) + " words, expected " +
                                    std::to_string(eval_n + heldout_n));
        }
        for (std::size_t i = 0; i < rs.size(); ++i) {
            rs[i]->split = static_cast<int>(i) < eval_n ? "eval" : "heldout";
        }
    }
    return records;
}

std::vector<CipherExample> build_examples(const std::vector<WordRecord>& records,
                                          const std::vector<int>& shifts) {
    std::vector<CipherExample> examples;
    examples.reserve(records.size() * shifts.size());
    for (const auto& r : records) {
        for (int k : shifts) {
            examples.push_back(CipherExample::make(r.word, ShiftLevel(k), r.bin, r.split));
        }
    }
    return examples;
}

FrequencyTable load_frequency_table(const std::string& path) {
    return FrequencyTable::from_csv(path);
}

void write_words_jsonl(const std::string& path, const std::vector<WordRecord>& records) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot write " + path);
    for (const auto& r : records) {
        nlohmann::json j{{"word", r.word}, {"logprob", r.logprob}, {"bin", r.bin},
                         {"split", r.split}};
        f << j.dump() << '\n';
    }
}

std::vector<WordRecord> read_words_jsonl(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open " + path);
    std::vector<WordRecord> records;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        records.push_back(WordRecord{j.at("word").get<std::string>(),
                                     j.at("logprob").get<double>(), j.at("bin").get<int>(),
                                     j.at("split").get<std::string>()});
    }
    return records;
}

void write_examples_jsonl(const std::string& path, const std::vector<CipherExample>& examples) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot write " + path);
    for (const auto& e : examples) {
        nlohmann::json j{{"id", e.id},       {"word", e.plaintext}, {"bin", e.bin},
                         {"split", e.split}, {"shift", e.shift},    {"encoded", e.encoded}};
        f << j.dump() << '\n';
    }
}

std::vector<CipherExample> read_examples_jsonl(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open " + path);
    std::vector<CipherExample> examples;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        CipherExample e;
        e.id = j.at("id").get<std::string>();
        e.plaintext = j.at("word").get<std::string>();
        e.bin = j.at("bin").get<int>();
        e.split = j.at("split").get<std::string>();
        e.shift = j.at("shift").get<int>();
        e.encoded = j.at("encoded").get<std::string>();
        examples.push_back(std::move(e));
    }
    return examples;
}

}  // namespace shiftprobe
