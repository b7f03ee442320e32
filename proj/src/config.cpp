#include "shiftprobe/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shiftprobe/errors.hpp"

namespace shiftprobe {

namespace {

using nlohmann::json;

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void maybe_shift_list(const json& j, const char* key, std::vector<int>& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (v.is_string()) {
        out = parse_int_list(v.get<std::string>());
    } else {
        out = v.get<std::vector<int>>();
    }
}

}  // namespace

std::vector<int> default_shifts() {
    std::vector<int> shifts;
    for (int k = 1; k <= 25; ++k) shifts.push_back(k);
    return shifts;
}

std::vector<int> parse_int_list(const std::string& spec) {
    std::vector<int> out;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        auto dash = part.find('-');
        if (dash == std::string::npos) {
            out.push_back(std::stoi(part));
        } else {
            int lo = std::stoi(part.substr(0, dash));
            int hi = std::stoi(part.substr(dash + 1));
            for (int v = lo; v <= hi; ++v) out.push_back(v);
        }
    }
    return out;
}

Config config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    Config c;
    maybe(j, "out_dir", c.out_dir);
    maybe(j, "seed", c.seed);
    maybe(j, "frequency_table", c.frequency_table);
    maybe(j, "concurrency", c.concurrency);
    maybe(j, "rate_limit_rpm", c.rate_limit_rpm);

    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        maybe(d, "vocab", c.dataset.vocab);
        maybe(d, "merges", c.dataset.merges);
        maybe(d, "word_marker", c.dataset.word_marker);
        maybe(d, "blocklist", c.dataset.blocklist);
        maybe(d, "n_bins", c.dataset.n_bins);
        maybe(d, "per_bin", c.dataset.per_bin);
        maybe(d, "eval_per_bin", c.dataset.eval_per_bin);
        maybe_shift_list(d, "shifts", c.dataset.shifts);
        maybe(d, "splits", c.dataset.splits);
    }
    if (j.contains("scorer")) {
        const auto& s = j.at("scorer");
        maybe(s, "kind", c.scorer.kind);
        maybe(s, "frequency_list", c.scorer.frequency_list);
        maybe(s, "base_url", c.scorer.base_url);
        maybe(s, "score_path", c.scorer.score_path);
    }
    if (j.contains("provider")) {
        const auto& p = j.at("provider");
        maybe(p, "kind", c.provider.kind);
        maybe(p, "base_url", c.provider.base_url);
        maybe(p, "chat_path", c.provider.chat_path);
        maybe(p, "model", c.provider.model);
        maybe(p, "auth_env", c.provider.auth_env);
        maybe(p, "body_template", c.provider.body_template);
        maybe(p, "response_pointer", c.provider.response_pointer);
        maybe(p, "cache_path", c.provider.cache_path);
        maybe(p, "max_retries", c.provider.max_retries);
        maybe(p, "retry_backoff_ms", c.provider.retry_backoff_ms);
    }
    if (j.contains("params")) {
        const auto& p = j.at("params");
        maybe(p, "temperature", c.params.temperature);
        maybe(p, "max_new_tokens", c.params.max_new_tokens);
    }
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        maybe(s, "q", c.sim.q);
        maybe(s, "eps_complement", c.sim.eps_complement);
        maybe(s, "memo_ceiling", c.sim.memo_ceiling);
        maybe(s, "prior_strength", c.sim.prior_strength);
        maybe(s, "lexicon", c.sim.lexicon);
    }
    if (j.contains("probe")) {
        const auto& p = j.at("probe");
        maybe(p, "styles", c.probe.styles);
        maybe_shift_list(p, "shifts", c.probe.shifts);
        maybe_shift_list(p, "bins", c.probe.bins);
        maybe(p, "splits", c.probe.splits);
        maybe(p, "resume", c.probe.resume);
        maybe(p, "demo_shift", c.probe.demo_shift);
        maybe(p, "demo_domain", c.probe.demo_domain);
        maybe(p, "corruption_seed", c.probe.corruption_seed);
    }
    if (j.contains("analyze")) {
        const auto& a = j.at("analyze");
        maybe(a, "style", c.analyze.style);
        maybe(a, "svg", c.analyze.svg);
    }
    if (j.contains("fit")) {
        const auto& f = j.at("fit");
        maybe(f, "style", c.fit.style);
        maybe(f, "ridge", c.fit.ridge);
        maybe(f, "standardize", c.fit.standardize);
        maybe(f, "max_iter", c.fit.max_iter);
        maybe(f, "tol", c.fit.tol);
    }
    if (j.contains("curves")) {
        const auto& v = j.at("curves");
        maybe(v, "q", c.curves.q);
        maybe(v, "word_len", c.curves.word_len);
        maybe(v, "memo_ceiling", c.curves.memo_ceiling);
        maybe(v, "delta", c.curves.delta);
    }

    if (c.dataset.shifts.empty()) c.dataset.shifts = default_shifts();
    return c;
}

Config load_config(const std::string& path) {
    if (path.empty()) {
        Config c;
        c.dataset.shifts = default_shifts();
        return c;
    }
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return config_from_json_text(buf.str());
}

std::string Config::dump() const {
    json j;
    j["out_dir"] = out_dir;
    j["seed"] = seed;
    j["frequency_table"] = frequency_table;
    j["concurrency"] = concurrency;
    j["rate_limit_rpm"] = rate_limit_rpm;
    j["dataset"] = {{"vocab", dataset.vocab},
                    {"merges", dataset.merges},
                    {"word_marker", dataset.word_marker},
                    {"blocklist", dataset.blocklist},
                    {"n_bins", dataset.n_bins},
                    {"per_bin", dataset.per_bin},
                    {"eval_per_bin", dataset.eval_per_bin},
                    {"shifts", dataset.shifts},
                    {"splits", dataset.splits}};
    j["scorer"] = {{"kind", scorer.kind},
                   {"frequency_list", scorer.frequency_list},
                   {"base_url", scorer.base_url},
                   {"score_path", scorer.score_path}};
    j["provider"] = {{"kind", provider.kind},
                     {"base_url", provider.base_url},
                     {"chat_path", provider.chat_path},
                     {"model", provider.model},
                     {"auth_env", provider.auth_env},
                     {"body_template", provider.body_template},
                     {"response_pointer", provider.response_pointer},
                     {"cache_path", provider.cache_path},
                     {"max_retries", provider.max_retries},
                     {"retry_backoff_ms", provider.retry_backoff_ms}};
    j["params"] = {{"temperature", params.temperature},
                   {"max_new_tokens", params.max_new_tokens}};
    j["sim"] = {{"q", sim.q},
                {"eps_complement", sim.eps_complement},
                {"memo_ceiling", sim.memo_ceiling},
                {"prior_strength", sim.prior_strength},
                {"lexicon", sim.lexicon}};
    j["probe"] = {{"styles", probe.styles},
                  {"shifts", probe.shifts},
                  {"bins", probe.bins},
                  {"splits", probe.splits},
                  {"resume", probe.resume},
                  {"demo_shift", probe.demo_shift},
                  {"demo_domain", probe.demo_domain},
                  {"corruption_seed", probe.corruption_seed}};
    j["analyze"] = {{"style", analyze.style}, {"svg", analyze.svg}};
    j["fit"] = {{"style", fit.style},
                {"ridge", fit.ridge},
                {"standardize", fit.standardize},
                {"max_iter", fit.max_iter},
                {"tol", fit.tol}};
    j["curves"] = {{"q", curves.q},
                   {"word_len", curves.word_len},
                   {"memo_ceiling", curves.memo_ceiling},
                   {"delta", curves.delta}};
    return j.dump(2);
}

}  // namespace shiftprobe
