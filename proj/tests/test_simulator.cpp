#include <doctest.h>

#include <cmath>
#include <map>

#include "shiftprobe/analysis.hpp"
#include "shiftprobe/errors.hpp"
#include "shiftprobe/simulator.hpp"

using namespace shiftprobe;

namespace {

SimParams noiseless() {
    SimParams p;
    p.q = 1.0;
    p.eps_complement = 0.0;
    p.memo_ceiling = 0.0;
    p.prior_strength = 0.0;
    return p;
}

std::vector<int> all_shifts() {
    std::vector<int> s;
    for (int k = 1; k <= 25; ++k) s.push_back(k);
    return s;
}

}  // namespace

TEST_CASE("symbolic curve is flat at 1.0") {
    auto curve = curve_symbolic(all_shifts());
    REQUIRE(curve.size() == 25);
    for (const auto& p : curve) CHECK(p.accuracy == 1.0);
}

TEST_CASE("noisy curve: analytic value at k=13 and exact two-way symmetry") {
    auto curve = curve_noisy(0.98, 7, all_shifts(), true);
    std::map<int, double> acc;
    for (const auto& p : curve) acc[p.shift] = p.accuracy;
    CHECK(acc[13] == doctest::Approx(std::pow(0.98, 91)).epsilon(1e-9));
    CHECK(std::fabs(acc[13] - 0.159) < 2e-3);
    for (int k = 1; k <= 25; ++k) CHECK(acc[k] == acc[26 - k]);

    // q = 1 degenerates to the symbolic curve.
    for (const auto& p : curve_noisy(1.0, 7, all_shifts(), true)) CHECK(p.accuracy == 1.0);

    // One-way pays the full k steps; two-way never does worse.
    auto one_way = curve_noisy(0.98, 7, all_shifts(), false);
    for (std::size_t i = 0; i < one_way.size(); ++i) {
        CHECK(curve[i].accuracy >= one_way[i].accuracy - 1e-15);
    }
}

TEST_CASE("noisy curve Monte-Carlo cross-check (independent letter model)") {
    // 1e5 trials of 7 independent letters at k = 13, two-way.
    const double q = 0.98;
    const int m = 13, L = 7, trials = 100000;
    Rng rng(555);
    long correct = 0;
    for (int t = 0; t < trials; ++t) {
        bool all_ok = true;
        for (int letter = 0; letter < L && all_ok; ++letter) {
            for (int op = 0; op < m; ++op) {
                if (rng.next_double() >= q) {
                    all_ok = false;
                    break;
                }
            }
        }
        if (all_ok) ++correct;
    }
    double mc = static_cast<double>(correct) / trials;
    double analytic = std::pow(q, m * L);
    double se = std::sqrt(analytic * (1 - analytic) / trials);
    CHECK(std::fabs(mc - analytic) < 3 * se);
}

TEST_CASE("two-way curve is monotone down to 13 and back up") {
    auto curve = curve_noisy(0.95, 7, all_shifts(), true);
    std::map<int, double> acc;
    for (const auto& p : curve) acc[p.shift] = p.accuracy;
    for (int k = 2; k <= 13; ++k) CHECK(acc[k] <= acc[k - 1] + 1e-15);
    for (int k = 14; k <= 25; ++k) CHECK(acc[k] >= acc[k - 1] - 1e-15);
}

TEST_CASE("memorization curve peaks at the table argmax and is scale-invariant") {
    auto freq = FrequencyTable::from_pairs({{1, 5.0}, {3, 4.0}, {13, 50.0}, {25, 2.0}});
    auto curve = curve_memorization(freq, 0.8, all_shifts());
    std::map<int, double> acc;
    for (const auto& p : curve) acc[p.shift] = p.accuracy;
    CHECK(acc[13] == doctest::Approx(0.8));
    for (int k = 1; k <= 25; ++k) CHECK(acc[k] <= acc[13]);

    auto doubled = FrequencyTable::from_pairs({{1, 10.0}, {3, 8.0}, {13, 100.0}, {25, 4.0}});
    auto curve2 = curve_memorization(doubled, 0.8, all_shifts());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        CHECK(curve[i].accuracy == doctest::Approx(curve2[i].accuracy).epsilon(1e-12));
    }

    auto uniform = FrequencyTable::from_pairs({{1, 1.0}, {2, 1.0}, {3, 1.0}});
    for (const auto& p : curve_memorization(uniform, 0.6, {1, 2, 3})) {
        CHECK(p.accuracy == doctest::Approx(0.6));
    }
}

TEST_CASE("probabilistic curve lifts and lowers with clamping") {
    std::vector<CurvePoint> base{{1, 0.5}, {2, 0.95}, {3, 0.1}};
    auto [high, low] = curve_probabilistic(base, 0.2);
    CHECK(high[0].accuracy == doctest::Approx(0.7));
    CHECK(low[0].accuracy == doctest::Approx(0.3));
    CHECK(high[1].accuracy == doctest::Approx(1.0));  // clamped
    CHECK(low[2].accuracy == doctest::Approx(0.0));   // clamped
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(high[i].accuracy >= low[i].accuracy);

    auto [h0, l0] = curve_probabilistic(base, 0.0);
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(h0[i].accuracy == l0[i].accuracy);
}

TEST_CASE("noiseless simulator emits faithful, correct transcripts") {
    auto params = noiseless();
    for (int k = 1; k <= 25; ++k) {
        auto ex = CipherExample::make("mariner", ShiftLevel(k), 1, "eval");
        auto raw = simulate_transcript(ex, PromptVariant::TextCoT, params);
        auto p = parse_transcript(raw, PromptVariant::TextCoT);
        REQUIRE(p.steps.size() == 7);
        CHECK(*faithful_answer(p) == "mariner");
        CHECK(*p.final_answer == "mariner");
    }
    // Standard style: only the final line.
    auto ex = CipherExample::make("stay", ShiftLevel(13), 1, "eval");
    auto raw = simulate_transcript(ex, PromptVariant::Standard, params);
    CHECK(raw == "Original text: \"stay\"");
    // Math style embeds the arithmetic.
    auto math_raw = simulate_transcript(ex, PromptVariant::MathCoT, params);
    CHECK(math_raw.find("1. f -> (5 - 13) mod 26 = 18 -> s") != std::string::npos);
}

TEST_CASE("simulator rejects unsupported styles") {
    auto ex = CipherExample::make("stay", ShiftLevel(13), 1, "eval");
    CHECK_THROWS_AS(simulate_transcript(ex, PromptVariant::NumberCoT, noiseless()),
                    UnsupportedStyle);
    CHECK_THROWS_AS(simulate_transcript(ex, PromptVariant::HiddenCoT, noiseless()),
                    UnsupportedStyle);
}

TEST_CASE("same seed and id give identical transcripts; different ids differ") {
    SimParams p = noiseless();
    p.q = 0.9;
    p.seed = 12345;
    auto ex = CipherExample::make("mariner", ShiftLevel(9), 2, "eval");
    auto a = simulate_transcript(ex, PromptVariant::TextCoT, p);
    auto b = simulate_transcript(ex, PromptVariant::TextCoT, p);
    CHECK(a == b);
    auto other = CipherExample::make("gardens", ShiftLevel(9), 2, "eval");
    CHECK(simulate_transcript(other, PromptVariant::TextCoT, p) != a);
}

TEST_CASE("self-correction: high-prior lexicon word overrides a one-off chain") {
    SimParams p;
    p.q = 1.0;
    p.eps_complement = 0.0;
    p.memo_ceiling = 0.0;
    p.prior_strength = 5.0;
    p.lexicon = {{"stay", -2.0}, {"junka", -20.0}, {"junkb", -22.0}, {"junkc", -24.0}};
    Rng rng(1);
    CHECK(select_final_answer("staz", p, rng) == "stay");
    // A chain far from every lexicon word is emitted as-is.
    CHECK(select_final_answer("qqqq", p, rng) == "qqqq");
    // With no prior pull the chain always stands.
    SimParams off = noiseless();
    Rng rng2(2);
    CHECK(select_final_answer("staz", off, rng2) == "staz");
}

TEST_CASE("low-prior chains survive: prior below the lexicon mean never rescues") {
    SimParams p;
    p.q = 1.0;
    p.eps_complement = 0.0;
    p.memo_ceiling = 0.0;
    p.prior_strength = 1.0;
    p.lexicon = {{"xcbrouw", -30.0}, {"mariner", -8.0}, {"gardens", -9.0}, {"winners", -10.0}};
    Rng rng(3);
    // Chain one letter off the low-prob truth: its logprob (-30) sits below
    // the lexicon mean, so the (wrong) chain is kept.
    CHECK(select_final_answer("xcbrouq", p, rng) == "xcbrouq");
    // Chain one letter off a high-prob word: rescued.
    CHECK(select_final_answer("marinex", p, rng) == "mariner");
}

TEST_CASE("empirical accuracy converges to the analytic curve (eps=memo=prior=0)") {
    SimParams p = noiseless();
    p.q = 0.97;
    p.seed = 777;
    const int n = 10000;
    for (int k : {1, 13, 25}) {
        long correct = 0;
        for (int i = 0; i < n; ++i) {
            auto ex = CipherExample::make("mariner", ShiftLevel(k), 1, "eval");
            ex.id += "." + std::to_string(i);
            auto parsed = parse_transcript(simulate_transcript(ex, PromptVariant::TextCoT, p),
                                           PromptVariant::TextCoT);
            if (classify(parsed, "mariner").final_correct) ++correct;
        }
        double analytic = std::pow(p.q, 7.0 * ShiftLevel(k).min_steps());
        double got = static_cast<double>(correct) / n;
        double se = std::sqrt(analytic * (1 - analytic) / n);
        CHECK(std::fabs(got - analytic) < 3 * se + 1e-9);
    }
}

TEST_CASE("complement confusion: histogram modes at k and 26-k") {
    SimParams p;
    p.q = 0.97;
    p.eps_complement = 0.3;
    p.memo_ceiling = 0.0;
    p.prior_strength = 0.0;
    p.seed = 31337;
    for (int k : {6, 20}) {
        std::vector<ParsedTranscript> transcripts;
        int letters = 0;
        for (int i = 0; letters < 10000; ++i) {
            auto ex = CipherExample::make("mariner", ShiftLevel(k), 1, "eval");
            ex.id += "." + std::to_string(i);
            transcripts.push_back(parse_transcript(
                simulate_transcript(ex, PromptVariant::TextCoT, p), PromptVariant::TextCoT));
            letters += 7;
        }
        auto hist = shift_histogram(transcripts);
        auto [first, second] = hist.top_two();
        CHECK(((first == k && second == 26 - k) || (first == 26 - k && second == k)));
    }
}

TEST_CASE("memorization path forces the true plaintext at the frequent shift") {
    SimParams p;
    p.q = 0.5;  // chain is almost surely wrong at high min_steps
    p.eps_complement = 0.0;
    p.memo_ceiling = 0.9;
    p.prior_strength = 0.0;
    p.freq = FrequencyTable::from_pairs({{13, 10.0}, {1, 0.1}});
    p.seed = 11;
    int n = 2000, correct = 0;
    for (int i = 0; i < n; ++i) {
        auto ex = CipherExample::make("mariner", ShiftLevel(13), 1, "eval");
        ex.id += "." + std::to_string(i);
        auto parsed = parse_transcript(simulate_transcript(ex, PromptVariant::TextCoT, p),
                                       PromptVariant::TextCoT);
        if (classify(parsed, "mariner").final_correct) ++correct;
    }
    // memo_weight(13) = 0.9; chain accuracy is ~0.5^91, negligible.
    double rate = static_cast<double>(correct) / n;
    CHECK(rate > 0.85);
    CHECK(rate < 0.95);
    CHECK(p.memo_weight(13) == doctest::Approx(0.9));
    CHECK(p.memo_weight(1) == doctest::Approx(0.009));
}

TEST_CASE("temperature adds emission noise") {
    SimParams cold = noiseless();
    cold.seed = 5;
    SimParams hot = cold;
    hot.temperature = 1.0;
    int n = 500, cold_ok = 0, hot_ok = 0;
    for (int i = 0; i < n; ++i) {
        auto ex = CipherExample::make("mariner", ShiftLevel(2), 1, "eval");
        ex.id += "." + std::to_string(i);
        auto pc = parse_transcript(simulate_transcript(ex, PromptVariant::TextCoT, cold),
                                   PromptVariant::TextCoT);
        auto ph = parse_transcript(simulate_transcript(ex, PromptVariant::TextCoT, hot),
                                   PromptVariant::TextCoT);
        if (classify(pc, "mariner").final_correct) ++cold_ok;
        if (classify(ph, "mariner").final_correct) ++hot_ok;
    }
    CHECK(cold_ok == n);
    CHECK(hot_ok < n / 2);
}

TEST_CASE("simulator parameter validation") {
    SimParams p = noiseless();
    p.q = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = noiseless();
    p.eps_complement = 1.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = noiseless();
    p.prior_strength = 1.0;  // lexicon required
    CHECK_THROWS_AS(p.validate(), Error);
}
