#include "shiftprobe/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "shiftprobe/errors.hpp"

namespace shiftprobe {

namespace {

// Extra per-emitted-letter corruption when decoding at temperature > 0.
constexpr double kTemperatureLetterNoise = 0.25;

std::size_t hamming(const std::string& a, const std::string& b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

}  // namespace

void SimParams::validate() const {
    if (!(q > 0.0 && q <= 1.0)) throw Error("sim q must be in (0,1]");
    if (!(eps_complement >= 0.0 && eps_complement < 1.0)) {
        throw Error("sim eps_complement must be in [0,1)");
    }
    if (!(memo_ceiling >= 0.0 && memo_ceiling < 1.0)) throw Error("sim memo_ceiling must be in [0,1)");
    if (!(prior_strength >= 0.0)) throw Error("sim prior_strength must be >= 0");
    if (prior_strength > 0.0 && lexicon.empty()) {
        throw Error("sim lexicon must be nonempty when prior_strength > 0");
    }
    if (temperature < 0.0) throw Error("sim temperature must be >= 0");
}

double SimParams::memo_weight(int shift) const {
    return memo_ceiling * freq.normalized(shift) / freq.max_normalized();
}

std::vector<CurvePoint> curve_symbolic(const std::vector<int>& shifts) {
    std::vector<CurvePoint> out;
    out.reserve(shifts.size());
    for (int k : shifts) out.push_back({k, 1.0});
    return out;
}

std::vector<CurvePoint> curve_noisy(double q, int word_len, const std::vector<int>& shifts,
                                    bool two_way) {
    if (!(q > 0.0 && q <= 1.0)) throw Error("q must be in (0,1]");
    std::vector<CurvePoint> out;
    out.reserve(shifts.size());
    for (int k : shifts) {
        int steps = two_way ? ShiftLevel(k).min_steps() : k;
        out.push_back({k, std::pow(q, static_cast<double>(steps) * word_len)});
    }
    return out;
}

std::vector<CurvePoint> curve_memorization(const FrequencyTable& freq, double ceiling,
                                           const std::vector<int>& shifts) {
    double peak = freq.max_normalized();
    std::vector<CurvePoint> out;
    out.reserve(shifts.size());
    for (int k : shifts) out.push_back({k, ceiling * freq.normalized(k) / peak});
    return out;
}

std::pair<std::vector<CurvePoint>, std::vector<CurvePoint>> curve_probabilistic(
    const std::vector<CurvePoint>& base, double delta) {
    std::vector<CurvePoint> high = base;
    std::vector<CurvePoint> low = base;
    for (auto& p : high) p.accuracy = std::min(1.0, p.accuracy + delta);
    for (auto& p : low) p.accuracy = std::max(0.0, p.accuracy - delta);
    return {high, low};
}

int sample_applied_shift(ShiftLevel k, const SimParams& params, Rng& rng) {
    double u = rng.next_double();
    double p_intended = (1.0 - params.eps_complement) *
                        std::pow(params.q, static_cast<double>(k.min_steps()));
    if (u < p_intended) return k.value();
    int complement = k.complement().value();
    if (u < p_intended + params.eps_complement) return complement;
    // Uniform over the remaining shifts.
    for (;;) {
        int b = static_cast<int>(rng.next_below(26));
        if (b != k.value() && b != complement) return b;
    }
}

std::string select_final_answer(const std::string& chain, const SimParams& params, Rng& rng) {
    if (params.prior_strength <= 0.0 || params.lexicon.empty()) return chain;

    double lexicon_mean = 0.0;
    double chain_logprob = 0.0;
    bool chain_in_lexicon = false;
    for (const auto& [word, lp] : params.lexicon) {
        lexicon_mean += lp;
        if (word == chain) {
            chain_in_lexicon = true;
            chain_logprob = lp;
        }
    }
    lexicon_mean /= static_cast<double>(params.lexicon.size());
    if (!chain_in_lexicon) chain_logprob = lexicon_mean;

    // Candidates: the chain and any lexicon word within one letter of it.
    std::vector<std::pair<std::string, double>> candidates;
    candidates.emplace_back(chain, params.prior_strength * chain_logprob);
    for (const auto& [word, lp] : params.lexicon) {
        if (word != chain && word.size() == chain.size() && hamming(word, chain) <= 1) {
            candidates.emplace_back(word, params.prior_strength * lp);
        }
    }
    if (candidates.size() == 1) return chain;

    if (params.temperature > 0.0) {
        // Softmax sample over candidate scores.
        double max_s = candidates.front().second;
        for (const auto& c : candidates) max_s = std::max(max_s, c.second);
        double total = 0.0;
        std::vector<double> w(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            w[i] = std::exp((candidates[i].second - max_s) / params.temperature);
            total += w[i];
        }
        double u = rng.next_double() * total;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            u -= w[i];
            if (u <= 0.0) return candidates[i].first;
        }
        return candidates.back().first;
    }

    // Argmax; the chain (first) wins ties.
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (candidates[i].second > candidates[best].second) best = i;
    }
    return candidates[best].first;
}

std::string simulate_transcript(const CipherExample& example, PromptVariant style,
                                const SimParams& params) {
    if (style != PromptVariant::TextCoT && style != PromptVariant::MathCoT &&
        style != PromptVariant::Standard) {
        throw UnsupportedStyle(std::string("simulator does not support style: ") +
                               variant_name(style));
    }
    params.validate();

    Rng rng = Rng::for_key(params.seed, example.id);
    ShiftLevel k(example.shift);

    // Per letter: sample the applied backward shift, then (at temperature
    // > 0) possibly garble the emitted letter.
    std::string chain;
    chain.reserve(example.encoded.size());
    std::string body;
    for (std::size_t i = 0; i < example.encoded.size(); ++i) {
        char in = example.encoded[i];
        int applied = sample_applied_shift(k, params, rng);
        char out = pos_letter((letter_pos(in) - applied % 26 + 26) % 26);
        if (params.temperature > 0.0 &&
            rng.next_double() < params.temperature * kTemperatureLetterNoise) {
            out = static_cast<char>('a' + rng.next_below(26));
        }
        chain.push_back(out);
        if (style == PromptVariant::TextCoT) {
            body += std::to_string(i + 1) + ". " + in + " -> " + out + "\n";
        } else if (style == PromptVariant::MathCoT) {
            body += std::to_string(i + 1) + ". " + in + " -> (" + std::to_string(letter_pos(in)) +
                    " - " + std::to_string(k.value()) + ") mod 26 = " +
                    std::to_string(letter_pos(out)) + " -> " + out + "\n";
        }
    }

    // Final answer: memorization path with probability memo_weight(k),
    // otherwise the prior-vs-chain selection.
    std::string answer;
    if (rng.next_double() < params.memo_weight(k.value())) {
        answer = example.plaintext;
    } else {
        answer = select_final_answer(chain, params, rng);
    }

    body += "Original text: \"" + answer + "\"";
    return body;
}

}  // namespace shiftprobe
