#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "shiftprobe/errors.hpp"
#include "shiftprobe/tokenizer.hpp"

using namespace shiftprobe;

namespace {

const std::string kMarker = "\xC4\xA0";

// Toy vocabulary: "mar"/"iner" style pieces built strictly left to right.
BpeTokenizer toy_tokenizer() {
    std::map<std::string, int> vocab;
    int id = 0;
    for (char c = 'a'; c <= 'z'; ++c) vocab[std::string(1, c)] = id++;
    vocab[kMarker] = id++;
    for (const std::string& t : {"ma", "mar", "in", "ine", "iner", "st", "sta", "wa", "wal",
                                 "wall", "sh", "shr"}) {
        vocab[t] = id++;
    }
    vocab[kMarker + "mar"] = id++;
    vocab[kMarker + "shr"] = id++;
    std::vector<std::pair<std::string, std::string>> merges{
        {"m", "a"},  {"ma", "r"},  {"s", "h"},   {"sh", "r"}, {"s", "t"}, {"st", "a"},
        {"i", "n"},  {"in", "e"},  {"ine", "r"}, {"w", "a"},  {"wa", "l"}, {"wal", "l"},
        {kMarker, "mar"}, {kMarker, "shr"},
    };
    return BpeTokenizer::from_memory(vocab, merges, kMarker);
}

}  // namespace

TEST_CASE("bare tokenization splits mariner into mar + iner") {
    auto tok = toy_tokenizer();
    auto ids = tok.tokenize_piece("mariner", false);
    REQUIRE(ids.size() == 2);
    CHECK(tok.detokenize(ids) == "mariner");
    CHECK(tok.token_count_in_quote_context("mariner") == 2);
    CHECK(tok.token_count_in_quote_context("marwall") == 2);
    CHECK(tok.token_count_in_quote_context("qqq") == 3);  // no merges apply
}

TEST_CASE("tokenize round-trips on its own output") {
    auto tok = toy_tokenizer();
    for (const std::string text : {"mariner", "shriner stawall", "a mar iner", "st st st"}) {
        auto ids = tok.tokenize_text(text);
        std::string rebuilt = tok.detokenize(ids);
        CHECK(rebuilt == text);
        CHECK(tok.tokenize_text(rebuilt) == ids);
    }
}

TEST_CASE("word-initial pieces carry the boundary marker") {
    auto tok = toy_tokenizer();
    auto ids = tok.tokenize_text("mar mar");
    REQUIRE(ids.size() >= 2);
    CHECK(ids.front() != ids.back());  // second "mar" is the marked variant
    CHECK(tok.detokenize(ids) == "mar mar");
}

TEST_CASE("vocabulary and merges load from files") {
    std::string dir = std::string(SHIFTPROBE_SOURCE_DIR) + "/data";
    auto tok = BpeTokenizer::load(dir + "/vocab.json", dir + "/merges.txt");
    CHECK(tok.token_count_in_quote_context("mariner") == 2);
    CHECK(tok.token_count_in_quote_context("shrines") == 2);
    CHECK(tok.token_count_in_quote_context("paywall") == 2);
    CHECK(tok.token_count_in_quote_context("xcbrouw") == 2);
    CHECK(tok.token_count_in_quote_context("jsxrouw") == 2);
    CHECK(tok.token_count_in_quote_context("levjspx") == 2);
}

TEST_CASE("missing vocabulary file is an error") {
    CHECK_THROWS_AS(BpeTokenizer::load("/nonexistent/vocab.json", "/nonexistent/merges.txt"),
                    Error);
}
