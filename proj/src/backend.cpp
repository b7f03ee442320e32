#include "shiftprobe/backend.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <json.hpp>

#include "shiftprobe/errors.hpp"
#include "shiftprobe/rng.hpp"

namespace shiftprobe {

namespace {

long long steady_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Replace {{placeholder}} inside every string value of a JSON tree;
// "{{temperature}}" / "{{max_tokens}}" standing alone become numbers.
void substitute(nlohmann::json& node, const PromptInstance& prompt, const std::string& model,
                const DecodingParams& params) {
    if (node.is_object() || node.is_array()) {
        for (auto& child : node) substitute(child, prompt, model, params);
        return;
    }
    if (!node.is_string()) return;
    std::string s = node.get<std::string>();
    if (s == "{{temperature}}") {
        node = params.temperature;
        return;
    }
    if (s == "{{max_tokens}}") {
        node = params.max_new_tokens;
        return;
    }
    auto replace_all = [&s](std::string_view from, const std::string& to) {
        std::size_t pos = 0;
        while ((pos = s.find(from, pos)) != std::string::npos) {
            s.replace(pos, from.size(), to);
            pos += to.size();
        }
    };
    replace_all("{{model}}", model);
    replace_all("{{prompt}}", prompt.text);
    node = s;
}

}  // namespace

RateLimiter::RateLimiter(double permits_per_minute)
    : rate_per_ms_(permits_per_minute / 60000.0),
      tokens_(1.0),
      last_refill_ms_(steady_ms()) {}

void RateLimiter::acquire() {
    for (;;) {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            long long now = steady_ms();
            tokens_ = std::min(1.0 + rate_per_ms_ * 1000.0,
                               tokens_ + rate_per_ms_ * static_cast<double>(now - last_refill_ms_));
            last_refill_ms_ = now;
            if (tokens_ >= 1.0) {
                tokens_ -= 1.0;
                return;
            }
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
}

HttpChatProvider::HttpChatProvider(HttpProviderConfig config)
    : config_(std::move(config)), limiter_(config_.rate_limit_rpm) {}

std::string HttpChatProvider::id() const { return "http:" + config_.model; }

std::string HttpChatProvider::complete(const PromptInstance& prompt, const CipherExample& example,
                                       const DecodingParams& params) {
    (void)example;
    const char* key = config_.auth_env.empty() ? nullptr : std::getenv(config_.auth_env.c_str());
    if (!config_.auth_env.empty() && (!key || !*key)) {
        throw AuthMissing("environment variable " + config_.auth_env + " is not set");
    }

    nlohmann::json body;
    if (config_.body_template.empty()) {
        body = {{"model", config_.model},
                {"messages", nlohmann::json::array({nlohmann::json{{"role", "user"},
                                                                   {"content", prompt.text}}})},
                {"temperature", params.temperature},
                {"max_tokens", params.max_new_tokens}};
    } else {
        body = nlohmann::json::parse(config_.body_template);
        substitute(body, prompt, config_.model, params);
    }
    std::string payload = body.dump();

    int last_status = 0;
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(config_.retry_backoff_ms << (attempt - 1)));
        }
        limiter_.acquire();

        httplib::Client client(config_.base_url);
        client.set_connection_timeout(15);
        client.set_read_timeout(120);
        httplib::Headers headers;
        if (key) headers.emplace("Authorization", std::string("Bearer ") + key);
        auto res = client.Post(config_.chat_path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error";
            continue;
        }
        last_status = res->status;
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            if (res->has_header("Retry-After")) {
                double wait = std::atof(res->get_header_value("Retry-After").c_str());
                if (wait > 0 && wait < 60) {
                    std::this_thread::sleep_for(
                        std::chrono::milliseconds(static_cast<long>(wait * 1000)));
                }
            }
            continue;
        }
        if (res->status != 200) {
            throw HttpError(res->status, "chat endpoint returned HTTP " +
                                             std::to_string(res->status) + ": " + res->body);
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(res->body);
        } catch (const std::exception& e) {
            throw HttpError(200, std::string("chat response is not JSON: ") + e.what());
        }
        try {
            return j.at(nlohmann::json::json_pointer(config_.response_pointer))
                .get<std::string>();
        } catch (const std::exception&) {
            throw HttpError(200, "chat response missing text at pointer " +
                                     config_.response_pointer);
        }
    }
    throw HttpError(last_status, "chat endpoint failed after " +
                                     std::to_string(config_.max_retries + 1) + " attempts (" +
                                     last_error + ")");
}

ReplayProvider::ReplayProvider(const std::string& store_path) : store_path_(store_path) {
    TranscriptStore store(store_path);
    for (const auto& t : store.load_all()) {
        Transcript keyed = t;
        keyed.provider = "replay";  // replays match regardless of the original provider
        responses_[keyed.key()] = t.raw_response;
    }
}

std::string ReplayProvider::complete(const PromptInstance& prompt, const CipherExample& example,
                                     const DecodingParams& params) {
    Transcript probe;
    probe.example_id = example.id;
    probe.style = style_tag(prompt.style);
    probe.provider = "replay";
    probe.params = params;
    probe.prompt_hash = hex64(fnv1a64(prompt.text));
    auto it = responses_.find(probe.key());
    if (it == responses_.end()) {
        throw CacheMiss("no cached response for " + probe.key() + " in " + store_path_);
    }
    return it->second;
}

std::string SimulatorProvider::complete(const PromptInstance& prompt,
                                        const CipherExample& example,
                                        const DecodingParams& params) {
    SimParams sim = params_;
    sim.temperature = params.temperature;
    PromptVariant v = prompt.style.variant;
    // Corrupted/mismatched prompts share the Text-CoT response contract.
    if (v == PromptVariant::RandomCorrupted || v == PromptVariant::MismatchedDemo) {
        v = PromptVariant::TextCoT;
    }
    return simulate_transcript(example, v, sim);
}

std::string complete(Provider& provider, const PromptInstance& prompt,
                     const CipherExample& example, const DecodingParams& params) {
    return provider.complete(prompt, example, params);
}

std::string style_tag(const PromptStyle& style) {
    std::string tag = variant_name(style.variant);
    if (style.variant == PromptVariant::MismatchedDemo) {
        tag += "-d" + std::to_string(style.demo_shift);
        if (style.demo_domain == DemoDomain::Math) tag += "-math";
    } else if (style.variant == PromptVariant::RandomCorrupted) {
        tag += "-s" + std::to_string(style.corruption_seed);
    }
    return tag;
}

std::string test_input_for(const CipherExample& example, PromptVariant variant) {
    if (variant != PromptVariant::NumberCoT) return example.encoded;
    std::string out;
    for (std::size_t i = 0; i < example.encoded.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(letter_pos(example.encoded[i]));
    }
    return out;
}

ProbeResult run_probe(Provider& provider, const std::vector<CipherExample>& examples,
                      const PromptStyle& style, const DecodingParams& params,
                      TranscriptStore& store, const ProbeOptions& options) {
    std::vector<const CipherExample*> ordered;
    ordered.reserve(examples.size());
    for (const auto& e : examples) ordered.push_back(&e);
    std::sort(ordered.begin(), ordered.end(),
              [](const CipherExample* a, const CipherExample* b) { return a->id < b->id; });

    std::set<std::string> have;
    if (options.resume) have = store.load_keys();

    const std::string tag = style_tag(style);

    struct Job {
        const CipherExample* example;
        PromptInstance prompt;
        std::string key;
    };
    std::vector<Job> jobs;
    std::unordered_map<std::string, std::string> existing_keys_by_id;
    for (const CipherExample* ex : ordered) {
        PromptInstance prompt = render(style, ShiftLevel(ex->shift),
                                       test_input_for(*ex, style.variant));
        Transcript probe;
        probe.example_id = ex->id;
        probe.style = tag;
        probe.provider = provider.id();
        probe.params = params;
        probe.prompt_hash = hex64(fnv1a64(prompt.text));
        std::string key = probe.key();
        if (have.count(key)) {
            existing_keys_by_id.emplace(ex->id, key);
            continue;
        }
        jobs.push_back(Job{ex, std::move(prompt), std::move(key)});
    }

    std::atomic<std::size_t> next{0};
    std::mutex result_mutex;
    std::vector<Transcript> fresh;
    std::vector<ProbeFailure> failures;

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) break;
            const Job& job = jobs[i];
            try {
                std::string response = provider.complete(job.prompt, *job.example, params);
                Transcript t;
                t.example_id = job.example->id;
                t.style = tag;
                t.provider = provider.id();
                t.params = params;
                t.prompt_hash = hex64(fnv1a64(job.prompt.text));
                t.raw_response = std::move(response);
                t.timestamp = utc_timestamp();
                store.append(t);  // persisted before the run can report success
                std::lock_guard<std::mutex> lock(result_mutex);
                fresh.push_back(std::move(t));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(result_mutex);
                failures.push_back(ProbeFailure{job.example->id, e.what()});
            }
        }
    };

    int threads = std::clamp<int>(options.concurrency, 1, 64);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // Collect the full set for these examples: new completions plus the
    // already-stored ones that were skipped.
    ProbeResult result;
    result.failures = std::move(failures);
    std::unordered_map<std::string, Transcript> by_key;
    for (const auto& t : store.load_all()) by_key[t.key()] = t;
    std::unordered_map<std::string, const Transcript*> fresh_by_id;
    for (const auto& t : fresh) fresh_by_id[t.example_id] = &t;
    for (const CipherExample* ex : ordered) {
        auto eit = existing_keys_by_id.find(ex->id);
        if (eit != existing_keys_by_id.end()) {
            auto sit = by_key.find(eit->second);
            if (sit != by_key.end()) result.transcripts.push_back(sit->second);
            continue;
        }
        auto fit = fresh_by_id.find(ex->id);
        if (fit != fresh_by_id.end()) result.transcripts.push_back(*fit->second);
    }
    return result;
}

}  // namespace shiftprobe
