#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "shiftprobe/cipher.hpp"
#include "shiftprobe/prompts.hpp"

namespace shiftprobe {

// One "N. x -> y" step as written. output is empty for a masked '*' answer.
struct StepRecord {
    std::string input;
    std::optional<std::string> output;
};

struct ParsedTranscript {
    PromptVariant style = PromptVariant::TextCoT;
    std::vector<StepRecord> steps;
    std::optional<std::string> final_answer;  // lowercased, quotes stripped
    std::vector<std::string> warnings;
};

// Total parser: malformed step lines and missing markers produce warnings,
// never failures. A step line numbered 1 after other steps restarts the
// chain (models sometimes restate before answering); the last final-answer
// marker wins.
ParsedTranscript parse_transcript(const std::string& raw, PromptVariant style);

// Concatenated step outputs ("," joined in the number domain); absent when
// there are no steps or any step is masked.
std::optional<std::string> faithful_answer(const ParsedTranscript& p);

struct Quadrant {
    bool chain_correct = false;
    bool final_correct = false;
};

// truth is the plaintext word for letter styles, or the comma-separated
// position sequence for NumberCoT (see truth_for).
Quadrant classify(const ParsedTranscript& p, const std::string& truth);

// Domain-appropriate truth string for an example under a style.
std::string truth_for(const CipherExample& example, PromptVariant style);

// Parse + classify, with the grouping keys carried along.
struct AnalyzedRecord {
    std::string example_id;
    int shift = 0;
    int bin = 0;
    std::string split;
    Quadrant quad;
    ParsedTranscript parsed;
};

AnalyzedRecord analyze_one(const std::string& raw, PromptVariant style,
                           const CipherExample& example);

struct AccuracyCell {
    int shift = 0;
    int bin = 0;
    int n = 0;
    double overall_acc = 0.0;   // fraction final-correct
    double faithful_acc = 0.0;  // fraction chain-correct
};

// Grouped by (shift, bin), sorted.
std::vector<AccuracyCell> accuracy_table(const std::vector<AnalyzedRecord>& records);

// Quadrant counts: cc = chain correct & final correct, ci = chain correct &
// final incorrect, ic, ii likewise.
struct ConfusionCounts {
    long cc = 0, ci = 0, ic = 0, ii = 0;
    long total() const { return cc + ci + ic + ii; }
};

ConfusionCounts confusion_matrix(const std::vector<AnalyzedRecord>& records);

struct ConfusionCell {
    int shift = 0;
    int bin = 0;
    ConfusionCounts counts;
};

std::vector<ConfusionCell> confusion_by_group(const std::vector<AnalyzedRecord>& records);

// Counts of inferred backward shifts over all unmasked single-letter steps.
struct ShiftHistogram {
    std::array<long, 26> counts{};
    long total = 0;

    void add(int shift) {
        counts[static_cast<std::size_t>(shift)]++;
        total++;
    }
    double freq(int shift) const {
        return total == 0 ? 0.0 : static_cast<double>(counts[static_cast<std::size_t>(shift)]) /
                                      static_cast<double>(total);
    }
    // Indices of the two largest counts, largest first.
    std::pair<int, int> top_two() const;
};

ShiftHistogram shift_histogram(const std::vector<ParsedTranscript>& transcripts);

struct HistogramCell {
    int intended_shift = 0;
    ShiftHistogram hist;
};

std::vector<HistogramCell> histogram_by_shift(const std::vector<AnalyzedRecord>& records);

// CSV emission (see the matching read side in the CLI and tests).
void write_metrics_csv(const std::string& path, const std::vector<AccuracyCell>& cells);
void write_confusion_csv(const std::string& path, const std::vector<ConfusionCell>& cells);
void write_histogram_csv(const std::string& path, const std::vector<HistogramCell>& cells);

}  // namespace shiftprobe
