#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shiftprobe/transcript.hpp"

namespace shiftprobe {

// Resolved run configuration. Every CLI flag maps onto one of these fields;
// flags win over the config file.
struct Config {
    std::string out_dir = "out";
    std::uint64_t seed = 1729;

    struct Dataset {
        std::string vocab = "data/vocab.json";
        std::string merges = "data/merges.txt";
        std::string word_marker = "\xC4\xA0";  // GPT-2 style boundary marker
        std::string blocklist;                 // optional path; empty = no filtering
        int n_bins = 5;
        int per_bin = 150;
        int eval_per_bin = 100;
        std::vector<int> shifts;               // default 1..25
        std::vector<std::string> splits{"eval"};  // splits expanded into examples
    } dataset;

    struct Scorer {
        std::string kind = "ngram";  // ngram | uniform | http
        std::string frequency_list = "data/word_frequencies.txt";
        std::string base_url;
        std::string score_path = "/score";
    } scorer;

    std::string frequency_table = "data/shift_frequencies.csv";

    struct Provider {
        std::string kind = "simulator";  // simulator | replay | http_chat
        std::string base_url;
        std::string chat_path = "/v1/chat/completions";
        std::string model;
        std::string auth_env = "PROBE_API_KEY";
        std::string body_template;
        std::string response_pointer = "/choices/0/message/content";
        std::string cache_path;  // replay source store
        int max_retries = 3;
        int retry_backoff_ms = 500;
    } provider;

    DecodingParams params;  // temperature 0, max_new_tokens 200
    int concurrency = 4;
    double rate_limit_rpm = 60.0;

    struct Sim {
        double q = 0.97;
        double eps_complement = 0.1;
        double memo_ceiling = 0.4;
        double prior_strength = 1.0;
        std::string lexicon;  // words JSONL; empty = <out_dir>/words.jsonl
    } sim;

    struct Probe {
        std::vector<std::string> styles{"text-cot"};
        std::vector<int> shifts;  // filter; empty = all examples
        std::vector<int> bins;    // filter; empty = all
        std::vector<std::string> splits;  // filter; empty = all
        bool resume = true;
        int demo_shift = 14;             // mismatched
        std::string demo_domain = "text";  // mismatched: text | math
        std::uint64_t corruption_seed = 0; // random-corrupted
    } probe;

    struct Analyze {
        std::string style = "text-cot";
        bool svg = false;
    } analyze;

    struct Fit {
        std::string style = "text-cot";
        double ridge = 0.0;
        bool standardize = true;
        int max_iter = 100;
        double tol = 1e-10;
    } fit;

    struct Curves {
        double q = 0.97;
        int word_len = 7;
        double memo_ceiling = 0.7;
        double delta = 0.2;
    } curves;

    std::string words_path() const { return out_dir + "/words.jsonl"; }
    std::string examples_path() const { return out_dir + "/examples.jsonl"; }
    std::string store_path() const { return out_dir + "/store.jsonl"; }
    std::string lexicon_path() const { return sim.lexicon.empty() ? words_path() : sim.lexicon; }

    // Canonical JSON of the resolved config; hashed into manifests.
    std::string dump() const;
};

Config load_config(const std::string& path);
Config config_from_json_text(const std::string& text);

std::vector<int> default_shifts();  // 1..25

// "1,4,13" or "1-25" or "1-5,13,20-25".
std::vector<int> parse_int_list(const std::string& spec);

}  // namespace shiftprobe
