#pragma once

#include <mutex>
#include <set>
#include <string>
#include <vector>

namespace shiftprobe {

struct DecodingParams {
    double temperature = 0.0;
    int max_new_tokens = 200;

    std::string key_fragment() const;  // "t0_n200"
};

// One persisted model response, uniquely keyed by
// (example_id, style, provider, params, prompt_hash) within a run.
struct Transcript {
    std::string example_id;
    std::string style;
    std::string provider;
    DecodingParams params;
    std::string prompt_hash;
    std::string raw_response;
    std::string timestamp;

    std::string key() const;
    std::string serialize() const;
    static Transcript parse(const std::string& json_line);
};

// Append-only JSONL store; single writer, any number of readers.
class TranscriptStore {
  public:
    explicit TranscriptStore(std::string path) : path_(std::move(path)) {}

    // Serializes, appends and flushes before returning.
    void append(const Transcript& t);

    std::vector<Transcript> load_all() const;
    std::set<std::string> load_keys() const;

    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::mutex write_mutex_;
};

std::string utc_timestamp();

}  // namespace shiftprobe
