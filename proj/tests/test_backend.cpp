#include <doctest.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "shiftprobe/backend.hpp"
#include "shiftprobe/errors.hpp"

using namespace shiftprobe;

namespace {

std::vector<CipherExample> small_examples(int shift, int n) {
    const char* words[] = {"mariner", "gardens", "winners", "shrines", "xcbrouw", "jsxrouw"};
    std::vector<CipherExample> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(CipherExample::make(words[i % 6], ShiftLevel(shift), 1 + i % 5, "eval"));
    }
    return out;
}

SimParams fast_sim() {
    SimParams p;
    p.q = 1.0;
    p.eps_complement = 0.0;
    p.memo_ceiling = 0.0;
    p.prior_strength = 0.0;
    return p;
}

struct TempStore {
    std::string path;
    explicit TempStore(std::string p) : path(std::move(p)) { std::remove(path.c_str()); }
    ~TempStore() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("simulator probe: one transcript per example, persisted, resumable") {
    TempStore tmp("test_probe_store.jsonl");
    TranscriptStore store(tmp.path);
    SimulatorProvider provider(fast_sim());
    auto examples = small_examples(13, 6);
    PromptStyle style;
    style.variant = PromptVariant::TextCoT;
    DecodingParams params;

    auto result = run_probe(provider, examples, style, params, store);
    CHECK(result.failures.empty());
    CHECK(result.transcripts.size() == 6);
    CHECK(store.load_all().size() == 6);

    // Rerun: nothing new is issued, the same transcripts come back.
    auto again = run_probe(provider, examples, style, params, store);
    CHECK(again.transcripts.size() == 6);
    CHECK(store.load_all().size() == 6);

    // Responses are deterministic per (seed, id): byte-identical bodies.
    for (std::size_t i = 0; i < again.transcripts.size(); ++i) {
        CHECK(again.transcripts[i].raw_response == result.transcripts[i].raw_response);
    }

    // no-resume reissues and appends duplicates.
    ProbeOptions no_resume;
    no_resume.resume = false;
    run_probe(provider, examples, style, params, store, no_resume);
    CHECK(store.load_all().size() == 12);
}

TEST_CASE("replay provider returns cached responses and misses loudly") {
    TempStore tmp("test_replay_store.jsonl");
    {
        TranscriptStore store(tmp.path);
        SimulatorProvider provider(fast_sim());
        auto examples = small_examples(4, 3);
        PromptStyle style;
        style.variant = PromptVariant::TextCoT;
        run_probe(provider, examples, style, DecodingParams{}, store);
    }

    ReplayProvider replay(tmp.path);
    auto examples = small_examples(4, 3);
    PromptStyle style;
    style.variant = PromptVariant::TextCoT;
    auto prompt = render(style, ShiftLevel(4), examples[0].encoded);
    auto response = complete(replay, prompt, examples[0], DecodingParams{});
    CHECK(response.find("Original text:") != std::string::npos);
    // Identical key twice: byte-identical responses.
    CHECK(replay.complete(prompt, examples[0], DecodingParams{}) == response);

    auto unseen = CipherExample::make("paywall", ShiftLevel(9), 1, "eval");
    auto unseen_prompt = render(style, ShiftLevel(9), unseen.encoded);
    CHECK_THROWS_AS(replay.complete(unseen_prompt, unseen, DecodingParams{}), CacheMiss);
}

TEST_CASE("simulator provider maps corrupted/mismatched to text responses") {
    SimulatorProvider provider(fast_sim());
    auto ex = CipherExample::make("mariner", ShiftLevel(13), 1, "eval");
    PromptStyle style;
    style.variant = PromptVariant::RandomCorrupted;
    style.corruption_seed = 1;
    auto prompt = render(style, ShiftLevel(13), ex.encoded);
    auto response = provider.complete(prompt, ex, DecodingParams{});
    CHECK(response.find("Original text: \"mariner\"") != std::string::npos);

    PromptStyle hidden;
    hidden.variant = PromptVariant::HiddenCoT;
    auto hidden_prompt = render(hidden, ShiftLevel(13), ex.encoded);
    CHECK_THROWS_AS(provider.complete(hidden_prompt, ex, DecodingParams{}), UnsupportedStyle);
}

TEST_CASE("http chat provider: request shape, auth, retries") {
    httplib::Server server;
    std::atomic<int> hits{0};
    std::atomic<int> fail_first{0};
    std::string seen_auth, seen_body;
    std::mutex seen_mutex;

    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        hits++;
        {
            std::lock_guard<std::mutex> lock(seen_mutex);
            seen_auth = req.get_header_value("Authorization");
            seen_body = req.body;
        }
        if (fail_first.fetch_sub(1) > 0) {
            res.status = 500;
            return;
        }
        nlohmann::json reply{
            {"choices",
             {{{"message", {{"role", "assistant"}, {"content", "Original text: \"stay\""}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });

    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    while (!server.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(5));

    setenv("SHIFTPROBE_TEST_KEY", "sk-test-123", 1);
    HttpProviderConfig config;
    config.base_url = "http://127.0.0.1:" + std::to_string(port);
    config.model = "probe-model";
    config.auth_env = "SHIFTPROBE_TEST_KEY";
    config.retry_backoff_ms = 1;
    config.rate_limit_rpm = 600000;

    HttpChatProvider provider(config);
    auto ex = CipherExample::make("stay", ShiftLevel(13), 1, "eval");
    PromptStyle style;
    style.variant = PromptVariant::TextCoT;
    auto prompt = render(style, ShiftLevel(13), ex.encoded);
    DecodingParams params;
    params.temperature = 0.0;
    params.max_new_tokens = 200;

    SUBCASE("happy path sends the prompt as one user message") {
        auto response = provider.complete(prompt, ex, params);
        CHECK(response == "Original text: \"stay\"");
        std::lock_guard<std::mutex> lock(seen_mutex);
        CHECK(seen_auth == "Bearer sk-test-123");
        auto body = nlohmann::json::parse(seen_body);
        CHECK(body["model"] == "probe-model");
        CHECK(body["temperature"] == 0.0);
        CHECK(body["max_tokens"] == 200);
        REQUIRE(body["messages"].size() == 1);
        CHECK(body["messages"][0]["role"] == "user");
        CHECK(body["messages"][0]["content"] == prompt.text);
    }

    SUBCASE("transient 500s are retried") {
        fail_first = 2;
        auto response = provider.complete(prompt, ex, params);
        CHECK(response == "Original text: \"stay\"");
        CHECK(hits >= 3);
    }

    SUBCASE("missing auth variable fails precondition") {
        HttpProviderConfig bad = config;
        bad.auth_env = "SHIFTPROBE_UNSET_KEY_VAR";
        unsetenv("SHIFTPROBE_UNSET_KEY_VAR");
        HttpChatProvider unauth(bad);
        CHECK_THROWS_AS(unauth.complete(prompt, ex, params), AuthMissing);
    }

    SUBCASE("custom body template substitutes placeholders") {
        HttpProviderConfig templ = config;
        templ.body_template =
            R"({"m": "{{model}}", "input": "{{prompt}}", "temp": "{{temperature}}"})";
        templ.response_pointer = "/choices/0/message/content";
        HttpChatProvider custom(templ);
        custom.complete(prompt, ex, params);
        std::lock_guard<std::mutex> lock(seen_mutex);
        auto body = nlohmann::json::parse(seen_body);
        CHECK(body["m"] == "probe-model");
        CHECK(body["input"] == prompt.text);
        CHECK(body["temp"] == 0.0);
    }

    server.stop();
    server_thread.join();
}

TEST_CASE("style tags carry prompt-shaping options") {
    PromptStyle text;
    text.variant = PromptVariant::TextCoT;
    CHECK(style_tag(text) == "text-cot");

    PromptStyle mm;
    mm.variant = PromptVariant::MismatchedDemo;
    mm.demo_shift = 14;
    CHECK(style_tag(mm) == "mismatched-d14");
    mm.demo_domain = DemoDomain::Math;
    CHECK(style_tag(mm) == "mismatched-d14-math");

    PromptStyle rc;
    rc.variant = PromptVariant::RandomCorrupted;
    rc.corruption_seed = 42;
    CHECK(style_tag(rc) == "random-corrupted-s42");
}

TEST_CASE("number-domain test inputs are position sequences") {
    auto ex = CipherExample::make("stay", ShiftLevel(13), 1, "eval");
    CHECK(test_input_for(ex, PromptVariant::TextCoT) == "fgnl");
    CHECK(test_input_for(ex, PromptVariant::NumberCoT) == "5,6,13,11");
}
