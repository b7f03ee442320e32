#pragma once

#include <string>
#include <vector>

#include "shiftprobe/analysis.hpp"
#include "shiftprobe/backend.hpp"
#include "shiftprobe/config.hpp"

namespace shiftprobe {

// Pipeline commands behind the CLI subcommands. Each writes its artifacts
// under config.out_dir plus a manifest, and returns a process exit code
// (0 = no hard failures; partial results are always flushed).
int cmd_build_dataset(const Config& config);
int cmd_probe(const Config& config);
int cmd_analyze(const Config& config);
int cmd_fit(const Config& config);
int cmd_curves(const Config& config);

// Style construction shared by probe/analyze/fit: name plus the config's
// style options (demo shift, corruption seed).
PromptStyle make_prompt_style(const std::string& name, const Config& config);

// Loads examples.jsonl filtered to the probe's shifts/bins/splits.
std::vector<CipherExample> load_filtered_examples(const Config& config);

// Simulator parameters resolved from the config (lexicon + frequency table
// loaded from their files).
SimParams sim_params_from_config(const Config& config);

// Analyzed records for every stored transcript with the given style tag.
std::vector<AnalyzedRecord> analyze_store(const Config& config, const std::string& style_name);

}  // namespace shiftprobe
