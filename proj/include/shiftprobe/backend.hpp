#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "shiftprobe/cipher.hpp"
#include "shiftprobe/prompts.hpp"
#include "shiftprobe/simulator.hpp"
#include "shiftprobe/transcript.hpp"

namespace shiftprobe {

// Completion source: live HTTP chat endpoint, replay cache, or the built-in
// reasoner simulator.
class Provider {
  public:
    virtual ~Provider() = default;
    virtual std::string id() const = 0;
    // example supplies the simulator's ground truth and the replay key
    // context; the HTTP provider sends prompt.text verbatim as a single user
    // message.
    virtual std::string complete(const PromptInstance& prompt, const CipherExample& example,
                                 const DecodingParams& params) = 0;
};

// Token bucket, permits_per_minute refill. acquire() blocks.
class RateLimiter {
  public:
    explicit RateLimiter(double permits_per_minute);
    void acquire();

  private:
    double rate_per_ms_;
    double tokens_;
    long long last_refill_ms_;
    std::mutex mutex_;
};

struct HttpProviderConfig {
    std::string base_url;
    std::string chat_path = "/v1/chat/completions";
    std::string model;
    std::string auth_env = "PROBE_API_KEY";
    // JSON body template; {{model}}, {{prompt}}, {{temperature}} and
    // {{max_tokens}} are substituted into string/number positions.
    std::string body_template;
    std::string response_pointer = "/choices/0/message/content";
    int max_retries = 3;
    int retry_backoff_ms = 500;
    double rate_limit_rpm = 60.0;
};

class HttpChatProvider final : public Provider {
  public:
    explicit HttpChatProvider(HttpProviderConfig config);
    std::string id() const override;
    std::string complete(const PromptInstance& prompt, const CipherExample& example,
                         const DecodingParams& params) override;

  private:
    HttpProviderConfig config_;
    RateLimiter limiter_;
};

// Read-only cache of a previous run's store.
class ReplayProvider final : public Provider {
  public:
    explicit ReplayProvider(const std::string& store_path);
    std::string id() const override { return "replay"; }
    std::string complete(const PromptInstance& prompt, const CipherExample& example,
                         const DecodingParams& params) override;

  private:
    std::string store_path_;
    std::map<std::string, std::string> responses_;  // transcript key -> response
};

class SimulatorProvider final : public Provider {
  public:
    explicit SimulatorProvider(SimParams params) : params_(std::move(params)) {}
    std::string id() const override { return "simulator"; }
    std::string complete(const PromptInstance& prompt, const CipherExample& example,
                         const DecodingParams& params) override;

  private:
    SimParams params_;
};

std::string complete(Provider& provider, const PromptInstance& prompt,
                     const CipherExample& example, const DecodingParams& params);

// Style identity within a store key; options that change the prompt are part
// of the tag (mismatched demo shift, corruption seed).
std::string style_tag(const PromptStyle& style);

// Encoded test input for an example under a style (letters, or the position
// sequence for NumberCoT).
std::string test_input_for(const CipherExample& example, PromptVariant variant);

struct ProbeFailure {
    std::string example_id;
    std::string message;
};

struct ProbeResult {
    std::vector<Transcript> transcripts;
    std::vector<ProbeFailure> failures;
};

struct ProbeOptions {
    int concurrency = 4;
    bool resume = true;
};

// One transcript per example: renders the prompt, asks the provider, appends
// to the store before reporting. Requests are issued in example-id order;
// keys already in the store are skipped when resuming.
ProbeResult run_probe(Provider& provider, const std::vector<CipherExample>& examples,
                      const PromptStyle& style, const DecodingParams& params,
                      TranscriptStore& store, const ProbeOptions& options = {});

}  // namespace shiftprobe
