#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shiftprobe/cipher.hpp"
#include "shiftprobe/dataset.hpp"
#include "shiftprobe/prompts.hpp"
#include "shiftprobe/rng.hpp"

namespace shiftprobe {

// Parameters of the generative reasoner. Each knob maps to one behavioral
// signature: q to the difficulty decline, eps_complement to the 26-k
// confusion peaks, memo_ceiling (scaled by shift frequency) to the rot-13
// spike, prior_strength + lexicon to probability-driven unfaithfulness.
struct SimParams {
    double q = 0.97;              // per-implicit-operation success probability, (0, 1]
    double eps_complement = 0.1;  // probability of decoding with 26-k instead of k, [0, 1)
    double memo_ceiling = 0.4;    // memo weight at the most frequent shift, [0, 1)
    double prior_strength = 1.0;  // >= 0; pull of the output prior on the final answer
    std::vector<std::pair<std::string, double>> lexicon;  // (word, logprob) prior support
    FrequencyTable freq = FrequencyTable::from_pairs({{13, 1.0}});
    std::uint64_t seed = 0;
    double temperature = 0.0;  // decoding temperature; adds emission noise when > 0

    void validate() const;

    // memo_ceiling * freq_normalized(k) / max freq_normalized.
    double memo_weight(int shift) const;
};

struct CurvePoint {
    int shift;
    double accuracy;
};

// Symbolic reasoning: exact at every shift.
std::vector<CurvePoint> curve_symbolic(const std::vector<int>& shifts);

// Noisy reasoning over word_len independent letters. One-way pays k
// operations per letter, two-way pays min(k, 26-k).
std::vector<CurvePoint> curve_noisy(double q, int word_len, const std::vector<int>& shifts,
                                    bool two_way);

// Frequency-proportional accuracy, peaking at the table's argmax.
std::vector<CurvePoint> curve_memorization(const FrequencyTable& freq, double ceiling,
                                           const std::vector<int>& shifts);

// Base curve shifted by +delta / -delta, clamped to [0, 1].
std::pair<std::vector<CurvePoint>, std::vector<CurvePoint>> curve_probabilistic(
    const std::vector<CurvePoint>& base, double delta);

// Sampled backward shift for one reasoning step: the intended k with
// probability (1-eps)*q^min_steps, the complement 26-k with probability eps,
// otherwise a uniformly random other shift.
int sample_applied_shift(ShiftLevel k, const SimParams& params, Rng& rng);

// Final-answer rule given the concatenated chain: candidates are the chain
// itself plus lexicon words within one letter of it; each is scored by
// prior_strength * logprob, with the chain pinned to the lexicon mean when it
// is not a lexicon word. Ties keep the chain.
std::string select_final_answer(const std::string& chain, const SimParams& params, Rng& rng);

// Emit a model response for the example in the style's format (TextCoT,
// MathCoT or Standard): noisy per-letter steps, then a final answer drawn
// from the memorization/prior mixture. Deterministic given (seed, example id).
std::string simulate_transcript(const CipherExample& example, PromptVariant style,
                                const SimParams& params);

}  // namespace shiftprobe
