#include "shiftprobe/tokenizer.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "shiftprobe/errors.hpp"

namespace shiftprobe {

namespace {

std::string pair_key(const std::string& a, const std::string& b) {
    return a + '\x01' + b;
}

}  // namespace

BpeTokenizer BpeTokenizer::load(const std::string& vocab_path, const std::string& merges_path,
                                std::string marker) {
    std::ifstream vf(vocab_path);
    if (!vf) throw Error("cannot open vocabulary file: " + vocab_path);
    nlohmann::json j;
    try {
        vf >> j;
    } catch (const std::exception& e) {
        throw Error("malformed vocabulary JSON in " + vocab_path + ": " + e.what());
    }
    std::map<std::string, int> vocab;
    for (auto it = j.begin(); it != j.end(); ++it) {
        vocab[it.key()] = it.value().get<int>();
    }

    std::ifstream mf(merges_path);
    if (!mf) throw Error("cannot open merges file: " + merges_path);
    std::vector<std::pair<std::string, std::string>> merges;
    std::string line;
    while (std::getline(mf, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto sp = line.find(' ');
        if (sp == std::string::npos) throw Error("malformed merge line: " + line);
        merges.emplace_back(line.substr(0, sp), line.substr(sp + 1));
    }
    return from_memory(std::move(vocab), std::move(merges), std::move(marker));
}

BpeTokenizer BpeTokenizer::from_memory(std::map<std::string, int> vocab,
                                       std::vector<std::pair<std::string, std::string>> merges,
                                       std::string marker) {
    BpeTokenizer t;
    t.vocab_ = std::move(vocab);
    t.marker_ = std::move(marker);
    for (const auto& [tok, id] : t.vocab_) t.id_to_token_[id] = tok;
    int rank = 0;
    for (const auto& [a, b] : merges) t.merge_rank_[pair_key(a, b)] = rank++;
    return t;
}

std::vector<int> BpeTokenizer::tokenize_piece(std::string_view piece, bool word_initial) const {
    if (vocab_.empty()) throw EmptyVocabulary("tokenizer vocabulary is empty");
    std::vector<std::string> symbols;
    symbols.reserve(piece.size() + 1);
    if (word_initial) symbols.push_back(marker_);
    for (char c : piece) symbols.emplace_back(1, c);

    // Repeatedly merge every occurrence of the lowest-ranked adjacent pair.
    while (symbols.size() > 1) {
        int best_rank = std::numeric_limits<int>::max();
        for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
            auto it = merge_rank_.find(pair_key(symbols[i], symbols[i + 1]));
            if (it != merge_rank_.end() && it->second < best_rank) best_rank = it->second;
        }
        if (best_rank == std::numeric_limits<int>::max()) break;
        std::vector<std::string> next;
        next.reserve(symbols.size());
        for (std::size_t i = 0; i < symbols.size();) {
            if (i + 1 < symbols.size()) {
                auto it = merge_rank_.find(pair_key(symbols[i], symbols[i + 1]));
                if (it != merge_rank_.end() && it->second == best_rank) {
                    next.push_back(symbols[i] + symbols[i + 1]);
                    i += 2;
                    continue;
                }
            }
            next.push_back(symbols[i]);
            ++i;
        }
        symbols.swap(next);
    }

    std::vector<int> ids;
    ids.reserve(symbols.size());
    for (const auto& s : symbols) {
        auto it = vocab_.find(s);
        if (it == vocab_.end()) throw Error("symbol missing from vocabulary: '" + s + "'");
        ids.push_back(it->second);
    }
    return ids;
}

std::vector<int> BpeTokenizer::tokenize_text(std::string_view text) const {
    std::vector<int> ids;
    std::size_t start = 0;
    bool word_initial = false;
    while (start <= text.size()) {
        std::size_t sp = text.find(' ', start);
        std::string_view piece =
            sp == std::string_view::npos ? text.substr(start) : text.substr(start, sp - start);
        if (!piece.empty()) {
            auto piece_ids = tokenize_piece(piece, word_initial);
            ids.insert(ids.end(), piece_ids.begin(), piece_ids.end());
        }
        if (sp == std::string_view::npos) break;
        start = sp + 1;
        word_initial = true;
    }
    return ids;
}

std::string BpeTokenizer::detokenize(const std::vector<int>& ids) const {
    std::string out;
    for (int id : ids) {
        auto it = id_to_token_.find(id);
        if (it == id_to_token_.end()) throw Error("unknown token id: " + std::to_string(id));
        std::string_view tok = it->second;
        if (tok.substr(0, marker_.size()) == marker_) {
            out += ' ';
            out += tok.substr(marker_.size());
        } else {
            out += tok;
        }
    }
    return out;
}

std::size_t BpeTokenizer::token_count_in_quote_context(std::string_view word) const {
    return tokenize_piece(word, /*word_initial=*/false).size();
}

}  // namespace shiftprobe
