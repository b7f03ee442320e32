#include "shiftprobe/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "shiftprobe/dataset.hpp"
#include "shiftprobe/errors.hpp"
#include "shiftprobe/plot.hpp"
#include "shiftprobe/rng.hpp"
#include "shiftprobe/scorer.hpp"
#include "shiftprobe/simulator.hpp"
#include "shiftprobe/statfit.hpp"

namespace shiftprobe {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void ensure_out_dir(const Config& config) {
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw Error("cannot create out_dir '" + config.out_dir + "': " + ec.message());
}

std::string hash_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return "";
    std::stringstream buf;
    buf << f.rdbuf();
    return hex64(fnv1a64(buf.str()));
}

void write_manifest(const Config& config, const std::string& command,
                    const std::vector<std::string>& outputs, const std::string& provider_id,
                    const std::string& started, json extra = json::object()) {
    json m;
    m["command"] = command;
    m["config_hash"] = hex64(fnv1a64(config.dump()));
    m["dataset_hash"] = hash_file(config.examples_path());
    m["provider"] = provider_id;
    m["styles"] = config.probe.styles;
    m["shifts"] = config.probe.shifts.empty() ? config.dataset.shifts : config.probe.shifts;
    m["started"] = started;
    m["finished"] = utc_timestamp();
    m["outputs"] = outputs;
    for (auto& [k, v] : extra.items()) m[k] = v;
    std::ofstream f(config.out_dir + "/manifest_" + command + ".json", std::ios::trunc);
    f << m.dump(2) << '\n';
}

std::unique_ptr<ScorerClient> scorer_from_config(const Config& config) {
    try {
        return make_scorer(config.scorer.kind, config.scorer.frequency_list,
                           config.scorer.base_url, config.scorer.score_path);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("scorer.frequency_list: " + std::string(e.what()));
    }
}

std::unique_ptr<Provider> provider_from_config(const Config& config) {
    if (config.provider.kind == "simulator") {
        return std::make_unique<SimulatorProvider>(sim_params_from_config(config));
    }
    if (config.provider.kind == "replay") {
        if (config.provider.cache_path.empty()) {
            throw ConfigError("provider.cache_path: required for the replay provider");
        }
        return std::make_unique<ReplayProvider>(config.provider.cache_path);
    }
    if (config.provider.kind == "http_chat") {
        if (config.provider.base_url.empty()) {
            throw ConfigError("provider.base_url: required for the http_chat provider");
        }
        HttpProviderConfig hc;
        hc.base_url = config.provider.base_url;
        hc.chat_path = config.provider.chat_path;
        hc.model = config.provider.model;
        hc.auth_env = config.provider.auth_env;
        hc.body_template = config.provider.body_template;
        hc.response_pointer = config.provider.response_pointer;
        hc.max_retries = config.provider.max_retries;
        hc.retry_backoff_ms = config.provider.retry_backoff_ms;
        hc.rate_limit_rpm = config.rate_limit_rpm;
        return std::make_unique<HttpChatProvider>(hc);
    }
    throw ConfigError("provider.kind: unknown provider '" + config.provider.kind + "'");
}

PromptVariant base_variant(const std::string& style_name) {
    return variant_from_name(style_name);
}

}  // namespace

PromptStyle make_prompt_style(const std::string& name, const Config& config) {
    PromptStyle style;
    style.variant = base_variant(name);
    if (style.variant == PromptVariant::MismatchedDemo) {
        style.demo_shift = config.probe.demo_shift;
        style.demo_domain =
            config.probe.demo_domain == "math" ? DemoDomain::Math : DemoDomain::Text;
    }
    if (style.variant == PromptVariant::RandomCorrupted) {
        style.corruption_seed =
            config.probe.corruption_seed ? config.probe.corruption_seed : config.seed;
    }
    return style;
}

std::vector<CipherExample> load_filtered_examples(const Config& config) {
    auto examples = read_examples_jsonl(config.examples_path());
    auto keep_int = [](const std::vector<int>& filter, int v) {
        return filter.empty() || std::find(filter.begin(), filter.end(), v) != filter.end();
    };
    auto keep_str = [](const std::vector<std::string>& filter, const std::string& v) {
        return filter.empty() || std::find(filter.begin(), filter.end(), v) != filter.end();
    };
    std::erase_if(examples, [&](const CipherExample& e) {
        return !keep_int(config.probe.shifts, e.shift) || !keep_int(config.probe.bins, e.bin) ||
               !keep_str(config.probe.splits, e.split);
    });
    return examples;
}

SimParams sim_params_from_config(const Config& config) {
    SimParams p;
    p.q = config.sim.q;
    p.eps_complement = config.sim.eps_complement;
    p.memo_ceiling = config.sim.memo_ceiling;
    p.prior_strength = config.sim.prior_strength;
    p.seed = config.seed;
    p.freq = load_frequency_table(config.frequency_table);
    if (p.prior_strength > 0.0) {
        auto words = read_words_jsonl(config.lexicon_path());
        for (const auto& w : words) {
            if (w.split == "eval" || w.split.empty()) p.lexicon.emplace_back(w.word, w.logprob);
        }
    }
    return p;
}

int cmd_build_dataset(const Config& config) {
    std::string started = utc_timestamp();
    ensure_out_dir(config);

    BpeTokenizer tokenizer = [&] {
        try {
            return BpeTokenizer::load(config.dataset.vocab, config.dataset.merges,
                                      config.dataset.word_marker);
        } catch (const std::exception& e) {
            throw ConfigError("dataset.vocab/dataset.merges: " + std::string(e.what()));
        }
    }();

    auto candidates = apply_blocklist(enumerate_candidates(tokenizer), config.dataset.blocklist);
    auto scorer = scorer_from_config(config);
    auto scored = score_words(*scorer, candidates, config.concurrency);
    auto records = split_bins(
        bin_words(scored, config.dataset.n_bins, config.dataset.per_bin),
        config.dataset.eval_per_bin, config.dataset.per_bin - config.dataset.eval_per_bin);

    std::vector<WordRecord> selected;
    for (const auto& r : records) {
        if (config.dataset.splits.empty() ||
            std::find(config.dataset.splits.begin(), config.dataset.splits.end(), r.split) !=
                config.dataset.splits.end()) {
            selected.push_back(r);
        }
    }
    auto examples = build_examples(selected, config.dataset.shifts);

    write_words_jsonl(config.words_path(), records);
    write_examples_jsonl(config.examples_path(), examples);
    write_manifest(config, "build-dataset", {config.words_path(), config.examples_path()}, "",
                   started,
                   json{{"candidates", candidates.size()},
                        {"words", records.size()},
                        {"examples", examples.size()}});

    std::cout << "build-dataset: " << candidates.size() << " candidates, " << records.size()
              << " words, " << examples.size() << " examples\n";
    return 0;
}

int cmd_probe(const Config& config) {
    std::string started = utc_timestamp();
    ensure_out_dir(config);
    auto examples = load_filtered_examples(config);
    auto provider = provider_from_config(config);
    TranscriptStore store(config.store_path());

    ProbeOptions options;
    options.concurrency = config.concurrency;
    options.resume = config.probe.resume;

    std::size_t total = 0, failures = 0;
    for (const auto& style_name : config.probe.styles) {
        PromptStyle style = make_prompt_style(style_name, config);
        ProbeResult result = run_probe(*provider, examples, style, config.params, store, options);
        total += result.transcripts.size();
        failures += result.failures.size();
        for (const auto& f : result.failures) {
            std::cerr << "probe failure [" << f.example_id << "]: " << f.message << '\n';
        }
    }
    write_manifest(config, "probe", {config.store_path()}, provider->id(), started,
                   json{{"transcripts", total}, {"failures", failures}});
    std::cout << "probe: " << total << " transcripts (" << failures << " failures) -> "
              << config.store_path() << '\n';
    return failures == 0 ? 0 : 1;
}

std::vector<AnalyzedRecord> analyze_store(const Config& config, const std::string& style_name) {
    PromptStyle style = make_prompt_style(style_name, config);
    std::string tag = style_tag(style);
    PromptVariant variant = style.variant;

    auto examples = read_examples_jsonl(config.examples_path());
    std::unordered_map<std::string, const CipherExample*> by_id;
    for (const auto& e : examples) by_id[e.id] = &e;

    TranscriptStore store(config.store_path());
    std::vector<AnalyzedRecord> records;
    for (const auto& t : store.load_all()) {
        if (t.style != tag) continue;
        auto it = by_id.find(t.example_id);
        if (it == by_id.end()) continue;  // transcript from another dataset
        records.push_back(analyze_one(t.raw_response, variant, *it->second));
    }
    return records;
}

int cmd_analyze(const Config& config) {
    std::string started = utc_timestamp();
    ensure_out_dir(config);
    auto records = analyze_store(config, config.analyze.style);
    if (records.empty()) {
        std::cerr << "analyze: no transcripts for style '" << config.analyze.style << "' in "
                  << config.store_path() << '\n';
        return 1;
    }

    auto cells = accuracy_table(records);
    auto confusion = confusion_by_group(records);
    auto histograms = histogram_by_shift(records);

    std::string metrics = config.out_dir + "/metrics.csv";
    std::string confusion_path = config.out_dir + "/confusion.csv";
    std::string histogram_path = config.out_dir + "/histogram.csv";
    write_metrics_csv(metrics, cells);
    write_confusion_csv(confusion_path, confusion);
    write_histogram_csv(histogram_path, histograms);

    // Run summary: accuracy by shift and by bin, plus grand means.
    std::map<int, std::pair<double, long>> by_shift, by_bin;
    std::map<int, std::pair<double, long>> faithful_by_shift;
    double grand = 0;
    long warnings = 0;
    for (const auto& r : records) {
        by_shift[r.shift].first += r.quad.final_correct;
        by_shift[r.shift].second++;
        by_bin[r.bin].first += r.quad.final_correct;
        by_bin[r.bin].second++;
        faithful_by_shift[r.shift].first += r.quad.chain_correct;
        faithful_by_shift[r.shift].second++;
        grand += r.quad.final_correct;
        warnings += static_cast<long>(r.parsed.warnings.size());
    }
    json summary;
    summary["style"] = config.analyze.style;
    summary["n"] = records.size();
    summary["mean_accuracy"] = grand / static_cast<double>(records.size());
    summary["parse_warnings"] = warnings;
    for (auto& [shift, acc] : by_shift) {
        summary["accuracy_by_shift"][std::to_string(shift)] = acc.first / acc.second;
    }
    for (auto& [shift, acc] : faithful_by_shift) {
        summary["faithful_by_shift"][std::to_string(shift)] = acc.first / acc.second;
    }
    for (auto& [bin, acc] : by_bin) {
        summary["accuracy_by_bin"][std::to_string(bin)] = acc.first / acc.second;
    }
    std::string summary_path = config.out_dir + "/summary.json";
    {
        std::ofstream f(summary_path, std::ios::trunc);
        f << summary.dump(2) << '\n';
    }

    std::vector<std::string> outputs{metrics, confusion_path, histogram_path, summary_path};
    if (config.analyze.svg) {
        std::map<int, PlotSeries> per_bin;
        for (const auto& c : cells) {
            auto& s = per_bin[c.bin];
            s.name = "bin " + std::to_string(c.bin);
            s.points.emplace_back(c.shift, c.overall_acc);
        }
        std::vector<PlotSeries> series;
        for (auto& [bin, s] : per_bin) series.push_back(std::move(s));
        std::string svg = config.out_dir + "/accuracy.svg";
        write_svg_line_chart(svg, "Decoding accuracy by shift level", "shift level", "accuracy",
                             series);
        outputs.push_back(svg);

        std::vector<PlotSeries> hseries;
        for (const auto& h : histograms) {
            PlotSeries s;
            s.name = "rot-" + std::to_string(h.intended_shift);
            for (int k = 0; k < 26; ++k) s.points.emplace_back(k, h.hist.freq(k));
            hseries.push_back(std::move(s));
        }
        std::string hsvg = config.out_dir + "/histogram.svg";
        write_svg_line_chart(hsvg, "Inferred step shifts", "inferred shift", "frequency",
                             hseries);
        outputs.push_back(hsvg);
    }

    write_manifest(config, "analyze", outputs, "", started,
                   json{{"transcripts", records.size()}});
    std::cout << "analyze: " << records.size() << " transcripts, mean accuracy "
              << summary["mean_accuracy"].get<double>() << '\n';
    return 0;
}

int cmd_fit(const Config& config) {
    std::string started = utc_timestamp();
    ensure_out_dir(config);
    auto records = analyze_store(config, config.fit.style);
    if (records.empty()) {
        std::cerr << "fit: no transcripts for style '" << config.fit.style << "' in "
                  << config.store_path() << '\n';
        return 1;
    }

    auto examples = read_examples_jsonl(config.examples_path());
    auto scorer = scorer_from_config(config);
    auto freq = load_frequency_table(config.frequency_table);
    auto rows = build_design(records, examples, *scorer, freq);

    std::vector<RegressionRow> eval_rows, heldout_rows;
    std::vector<AnalyzedRecord> eval_records;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].split == "heldout") {
            heldout_rows.push_back(rows[i]);
        } else {
            eval_rows.push_back(rows[i]);
            eval_records.push_back(records[i]);
        }
    }

    FitOptions options;
    options.max_iter = config.fit.max_iter;
    options.tol = config.fit.tol;
    options.ridge = config.fit.ridge;
    options.standardize = config.fit.standardize;
    FitResult fit = fit_logistic(eval_rows, options);

    std::optional<HeldoutMetrics> heldout;
    if (!heldout_rows.empty()) heldout = heldout_eval(fit, heldout_rows);

    std::string report_path = config.out_dir + "/fit_report.json";
    {
        std::ofstream f(report_path, std::ios::trunc);
        f << fit_report_json(fit, heldout) << '\n';
    }

    auto curve = prediction_curve(fit, eval_rows, eval_records);
    std::string curve_path = config.out_dir + "/prediction_curve.csv";
    {
        std::ofstream f(curve_path, std::ios::trunc);
        f << "shift,bin,predicted_acc\n";
        for (const auto& p : curve) f << p.shift << ',' << p.bin << ',' << p.predicted_acc << '\n';
    }

    write_manifest(config, "fit", {report_path, curve_path}, "", started,
                   json{{"n_eval", eval_rows.size()}, {"n_heldout", heldout_rows.size()}});
    std::cout << "fit: n=" << eval_rows.size() << " loglik=" << fit.loglik
              << " converged=" << (fit.converged ? "yes" : "no") << '\n';
    return 0;
}

int cmd_curves(const Config& config) {
    std::string started = utc_timestamp();
    ensure_out_dir(config);
    auto shifts = default_shifts();

    auto write_curve = [&](const std::string& name, const std::vector<CurvePoint>& pts) {
        std::string path = config.out_dir + "/curves_" + name + ".csv";
        std::ofstream f(path, std::ios::trunc);
        f << "shift,accuracy\n";
        for (const auto& p : pts) f << p.shift << ',' << p.accuracy << '\n';
        return path;
    };

    auto freq = load_frequency_table(config.frequency_table);
    auto two_way = curve_noisy(config.curves.q, config.curves.word_len, shifts, true);
    auto [high, low] = curve_probabilistic(two_way, config.curves.delta);

    std::vector<std::string> outputs;
    outputs.push_back(write_curve("symbolic", curve_symbolic(shifts)));
    outputs.push_back(
        write_curve("noisy_oneway", curve_noisy(config.curves.q, config.curves.word_len, shifts,
                                                false)));
    outputs.push_back(write_curve("noisy_twoway", two_way));
    outputs.push_back(
        write_curve("memorization", curve_memorization(freq, config.curves.memo_ceiling, shifts)));

    std::string prob_path = config.out_dir + "/curves_probabilistic.csv";
    {
        std::ofstream f(prob_path, std::ios::trunc);
        f << "shift,accuracy,bin\n";
        for (const auto& p : high) f << p.shift << ',' << p.accuracy << ",1\n";
        for (const auto& p : low) f << p.shift << ',' << p.accuracy << ",5\n";
    }
    outputs.push_back(prob_path);

    write_manifest(config, "curves", outputs, "", started);
    std::cout << "curves: wrote " << outputs.size() << " curve files to " << config.out_dir
              << '\n';
    return 0;
}

}  // namespace shiftprobe
