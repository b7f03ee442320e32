#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shiftprobe/commands.hpp"
#include "shiftprobe/config.hpp"
#include "shiftprobe/errors.hpp"

namespace {

struct GlobalFlags {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
};

void add_global(CLI::App* cmd, GlobalFlags& g) {
    cmd->add_option("--config", g.config_path, "Config file (JSON)");
    cmd->add_option("--out", g.out_dir, "Output directory (overrides config out_dir)");
    cmd->add_option("--seed", g.seed, "Random seed (overrides config seed)");
}

shiftprobe::Config resolve(const GlobalFlags& g) {
    shiftprobe::Config config = shiftprobe::load_config(g.config_path);
    if (!g.out_dir.empty()) config.out_dir = g.out_dir;
    if (g.seed >= 0) config.seed = static_cast<std::uint64_t>(g.seed);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shift-cipher chain-of-thought probe harness"};
    app.require_subcommand(1);

    GlobalFlags g_build, g_probe, g_analyze, g_fit, g_curves;

    auto* build = app.add_subcommand("build-dataset",
                                     "Enumerate, score, bin and split the word dataset; expand "
                                     "it into cipher examples");
    add_global(build, g_build);

    auto* probe = app.add_subcommand("probe", "Render prompts and collect model transcripts");
    add_global(probe, g_probe);
    std::vector<std::string> styles;
    std::string shifts_spec, bins_spec, provider_kind, demo_domain, splits_spec;
    long long demo_shift = -1, corrupt_seed = -1;
    double temperature = -1.0;
    int max_new_tokens = -1;
    bool no_resume = false;
    probe->add_option("--style", styles, "Prompt style(s) to run");
    probe->add_option("--shifts", shifts_spec, "Shift filter, e.g. 1-25 or 1,4,13");
    probe->add_option("--bins", bins_spec, "Bin filter, e.g. 1,5");
    probe->add_option("--splits", splits_spec, "Split filter: eval,heldout");
    probe->add_option("--provider", provider_kind, "simulator | replay | http_chat");
    probe->add_option("--demo-shift", demo_shift, "Demonstration shift for mismatched prompts");
    probe->add_option("--demo-domain", demo_domain, "Mismatched demo layout: text | math");
    probe->add_option("--corrupt-seed", corrupt_seed, "Seed for random-corrupted demonstrations");
    probe->add_option("--temperature", temperature, "Decoding temperature");
    probe->add_option("--max-new-tokens", max_new_tokens, "Completion token limit");
    probe->add_flag("--no-resume", no_resume, "Re-request transcripts already in the store");

    auto* analyze = app.add_subcommand("analyze",
                                       "Parse the transcript store into metrics, confusion and "
                                       "histogram CSVs");
    add_global(analyze, g_analyze);
    std::string analyze_style;
    bool svg = false;
    long long analyze_demo_shift = -1;
    analyze->add_option("--style", analyze_style, "Style to analyze");
    analyze->add_option("--demo-shift", analyze_demo_shift,
                        "Demo shift used when the style was probed (mismatched)");
    analyze->add_flag("--svg", svg, "Also write SVG charts");

    auto* fit = app.add_subcommand("fit", "Fit the logistic regression and report significance");
    add_global(fit, g_fit);
    std::string fit_style;
    double ridge = -1.0;
    bool no_standardize = false;
    fit->add_option("--style", fit_style, "Style whose transcripts feed the regression");
    fit->add_option("--ridge", ridge, "Ridge penalty (separation rescue)");
    fit->add_flag("--no-standardize", no_standardize, "Fit on raw predictor scales");

    auto* curves = app.add_subcommand("curves", "Emit the hypothetical reasoning curves as CSV");
    add_global(curves, g_curves);
    double q = -1.0, delta = -1.0, ceiling = -1.0;
    int word_len = -1;
    curves->add_option("--q", q, "Per-operation success probability");
    curves->add_option("--word-len", word_len, "Word length for the noisy curves");
    curves->add_option("--delta", delta, "Probabilistic high/low offset");
    curves->add_option("--ceiling", ceiling, "Memorization curve ceiling");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return shiftprobe::cmd_build_dataset(resolve(g_build));

        if (probe->parsed()) {
            shiftprobe::Config config = resolve(g_probe);
            if (!styles.empty()) config.probe.styles = styles;
            if (!shifts_spec.empty()) config.probe.shifts = shiftprobe::parse_int_list(shifts_spec);
            if (!bins_spec.empty()) config.probe.bins = shiftprobe::parse_int_list(bins_spec);
            if (!splits_spec.empty()) {
                config.probe.splits.clear();
                std::stringstream ss(splits_spec);
                std::string part;
                while (std::getline(ss, part, ',')) config.probe.splits.push_back(part);
            }
            if (!provider_kind.empty()) config.provider.kind = provider_kind;
            if (demo_shift >= 0) config.probe.demo_shift = static_cast<int>(demo_shift);
            if (!demo_domain.empty()) config.probe.demo_domain = demo_domain;
            if (corrupt_seed >= 0) {
                config.probe.corruption_seed = static_cast<std::uint64_t>(corrupt_seed);
            }
            if (temperature >= 0.0) config.params.temperature = temperature;
            if (max_new_tokens > 0) config.params.max_new_tokens = max_new_tokens;
            if (no_resume) config.probe.resume = false;
            return shiftprobe::cmd_probe(config);
        }

        if (analyze->parsed()) {
            shiftprobe::Config config = resolve(g_analyze);
            if (!analyze_style.empty()) config.analyze.style = analyze_style;
            if (analyze_demo_shift >= 0) {
                config.probe.demo_shift = static_cast<int>(analyze_demo_shift);
            }
            if (svg) config.analyze.svg = true;
            return shiftprobe::cmd_analyze(config);
        }

        if (fit->parsed()) {
            shiftprobe::Config config = resolve(g_fit);
            if (!fit_style.empty()) config.fit.style = fit_style;
            if (ridge >= 0.0) config.fit.ridge = ridge;
            if (no_standardize) config.fit.standardize = false;
            return shiftprobe::cmd_fit(config);
        }

        if (curves->parsed()) {
            shiftprobe::Config config = resolve(g_curves);
            if (q > 0.0) config.curves.q = q;
            if (word_len > 0) config.curves.word_len = word_len;
            if (delta >= 0.0) config.curves.delta = delta;
            if (ceiling >= 0.0) config.curves.memo_ceiling = ceiling;
            return shiftprobe::cmd_curves(config);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
