#include "shiftprobe/transcript.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "shiftprobe/errors.hpp"

namespace shiftprobe {

std::string DecodingParams::key_fragment() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "t%g_n%d", temperature, max_new_tokens);
    return buf;
}

std::string Transcript::key() const {
    return example_id + '|' + style + '|' + provider + '|' + params.key_fragment() + '|' +
           prompt_hash;
}

std::string Transcript::serialize() const {
    nlohmann::json j{{"example_id", example_id},
                     {"style", style},
                     {"provider", provider},
                     {"temperature", params.temperature},
                     {"max_new_tokens", params.max_new_tokens},
                     {"prompt_hash", prompt_hash},
                     {"raw_response", raw_response},
                     {"timestamp", timestamp}};
    return j.dump();
}

Transcript Transcript::parse(const std::string& json_line) {
    nlohmann::json j = nlohmann::json::parse(json_line);
    Transcript t;
    t.example_id = j.at("example_id").get<std::string>();
    t.style = j.at("style").get<std::string>();
    t.provider = j.at("provider").get<std::string>();
    t.params.temperature = j.at("temperature").get<double>();
    t.params.max_new_tokens = j.at("max_new_tokens").get<int>();
    t.prompt_hash = j.at("prompt_hash").get<std::string>();
    t.raw_response = j.at("raw_response").get<std::string>();
    t.timestamp = j.at("timestamp").get<std::string>();
    return t;
}

void TranscriptStore::append(const Transcript& t) {
    std::lock_guard<std::mutex> lock(write_mutex_);
    std::ofstream f(path_, std::ios::app);
    if (!f) throw Error("cannot append to transcript store: " + path_);
    f << t.serialize() << '\n';
    f.flush();
    if (!f) throw Error("write to transcript store failed: " + path_);
}

std::vector<Transcript> TranscriptStore::load_all() const {
    std::vector<Transcript> out;
    std::ifstream f(path_);
    if (!f) return out;  // absent store reads as empty
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty()) out.push_back(Transcript::parse(line));
    }
    return out;
}

std::set<std::string> TranscriptStore::load_keys() const {
    std::set<std::string> keys;
    for (const auto& t : load_all()) keys.insert(t.key());
    return keys;
}

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace shiftprobe
