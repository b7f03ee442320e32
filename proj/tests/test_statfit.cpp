#include <doctest.h>

#include <cmath>
#include <vector>

#include "shiftprobe/errors.hpp"
#include "shiftprobe/rng.hpp"
#include "shiftprobe/statfit.hpp"

using namespace shiftprobe;

namespace {

RegressionRow row_with(int correct, double x = 0.0) {
    RegressionRow r;
    r.correct = correct;
    r.input_logprob = x;  // single live predictor in the synthetic tests
    return r;
}

double bernoulli_loglik(const std::vector<std::pair<double, int>>& data, double b0, double b1) {
    double ll = 0;
    for (const auto& [x, y] : data) {
        double eta = b0 + b1 * x;
        ll += y * eta - (std::max(eta, 0.0) + std::log1p(std::exp(-std::fabs(eta))));
    }
    return ll;
}

}  // namespace

TEST_CASE("intercept-only 75/25 fit recovers ln 3") {
    std::vector<RegressionRow> rows;
    for (int i = 0; i < 75; ++i) rows.push_back(row_with(1));
    for (int i = 0; i < 25; ++i) rows.push_back(row_with(0));
    auto fit = fit_logistic(rows);
    CHECK(fit.converged);
    REQUIRE(!fit.coefficients.empty());
    CHECK(fit.coefficients[0].name == "intercept");
    CHECK(fit.coefficients[0].coef == doctest::Approx(std::log(3.0)).epsilon(1e-8));
    // All-constant predictors are dropped, reported with null effect.
    for (std::size_t i = 1; i < fit.coefficients.size(); ++i) {
        CHECK(fit.coefficients[i].coef == 0.0);
        CHECK(fit.coefficients[i].p == 1.0);
    }
}

TEST_CASE("intercept-only 50/50 fit gives zero") {
    std::vector<RegressionRow> rows;
    for (int i = 0; i < 50; ++i) rows.push_back(row_with(1));
    for (int i = 0; i < 50; ++i) rows.push_back(row_with(0));
    auto fit = fit_logistic(rows);
    CHECK(fit.coefficients[0].coef == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("synthetic (1, 2) recovery matches an independent grid search") {
    // y ~ Bernoulli(sigma(1 + 2x)), x ~ Uniform(-2, 2), n = 10,000.
    Rng rng(4242);
    std::vector<RegressionRow> rows;
    std::vector<std::pair<double, int>> data;
    for (int i = 0; i < 10000; ++i) {
        double x = rng.next_double() * 4.0 - 2.0;
        double p = 1.0 / (1.0 + std::exp(-(1.0 + 2.0 * x)));
        int y = rng.next_double() < p ? 1 : 0;
        rows.push_back(row_with(y, x));
        data.emplace_back(x, y);
    }
    auto fit = fit_logistic(rows);
    REQUIRE(fit.converged);
    double b0 = fit.coefficients[0].coef;
    double b1 = 0;
    for (const auto& c : fit.coefficients) {
        if (c.name == "input_logprob") b1 = c.coef;
    }
    CHECK(std::fabs(b0 - 1.0) < 0.1);
    CHECK(std::fabs(b1 - 2.0) < 0.1);

    // Coarse grid-search oracle over (b0, b1), step 0.01.
    double best_b0 = 0, best_b1 = 0, best_ll = -1e300;
    for (double g0 = 0.5; g0 <= 1.5; g0 += 0.01) {
        for (double g1 = 1.5; g1 <= 2.5; g1 += 0.01) {
            double ll = bernoulli_loglik(data, g0, g1);
            if (ll > best_ll) {
                best_ll = ll;
                best_b0 = g0;
                best_b1 = g1;
            }
        }
    }
    CHECK(std::fabs(best_b0 - b0) < 0.01 + 1e-9);
    CHECK(std::fabs(best_b1 - b1) < 0.01 + 1e-9);

    // Wald significance of the injected effect.
    for (const auto& c : fit.coefficients) {
        if (c.name == "input_logprob") {
            CHECK(c.z > 8.0);
            CHECK(c.p < 1e-15);
        }
    }
}

TEST_CASE("log-likelihood is non-decreasing across Newton iterations") {
    Rng rng(99);
    std::vector<RegressionRow> rows;
    for (int i = 0; i < 500; ++i) {
        double x = rng.next_double() * 6.0 - 3.0;
        double p = 1.0 / (1.0 + std::exp(-(0.5 - 1.5 * x)));
        rows.push_back(row_with(rng.next_double() < p ? 1 : 0, x));
    }
    auto fit = fit_logistic(rows);
    REQUIRE(fit.loglik_trace.size() >= 2);
    for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i) {
        CHECK(fit.loglik_trace[i] >= fit.loglik_trace[i - 1] - 1e-12);
    }
}

TEST_CASE("separation is detected and ridge rescues it") {
    std::vector<RegressionRow> all_ones;
    for (int i = 0; i < 20; ++i) all_ones.push_back(row_with(1));
    CHECK_THROWS_AS(fit_logistic(all_ones), SeparationError);

    // Perfectly separated predictor.
    std::vector<RegressionRow> separated;
    for (int i = 0; i < 40; ++i) {
        separated.push_back(row_with(i < 20 ? 0 : 1, i < 20 ? -1.0 : 1.0));
    }
    CHECK_THROWS_AS(fit_logistic(separated), SeparationError);

    FitOptions ridge;
    ridge.ridge = 1.0;
    auto fit = fit_logistic(separated, ridge);
    CHECK(fit.se_approximate);
    CHECK(std::isfinite(fit.loglik));
}

TEST_CASE("predict: zero coefficients give 0.5; intercept ln 3 gives 0.75") {
    FitResult fit;
    fit.coefficients.push_back({"intercept", 0.0, 0, 0, 1});
    CHECK(predict(fit, row_with(0)) == doctest::Approx(0.5));
    fit.coefficients[0].coef = std::log(3.0);
    CHECK(predict(fit, row_with(0)) == doctest::Approx(0.75).epsilon(1e-12));

    // Monotone in a positively-weighted predictor.
    fit.coefficients.push_back({"output_logprob", 0.5, 0, 0, 1});
    RegressionRow lo, hi;
    lo.output_logprob = -10;
    hi.output_logprob = -5;
    CHECK(predict(fit, hi) > predict(fit, lo));
}

TEST_CASE("standardization changes coefficients but not predictions") {
    Rng rng(31);
    std::vector<RegressionRow> rows;
    for (int i = 0; i < 800; ++i) {
        RegressionRow r;
        r.input_logprob = rng.next_double() * 30.0 - 40.0;
        r.output_logprob = rng.next_double() * 20.0 - 25.0;
        r.shift_level = 1 + static_cast<double>(rng.next_below(25));
        r.min_steps = std::min(r.shift_level, 26.0 - r.shift_level);
        r.shift_freq = rng.next_double();
        double eta = 0.3 + 0.1 * r.output_logprob - 0.2 * r.min_steps + 1.5 * r.shift_freq;
        r.correct = rng.next_double() < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0;
        rows.push_back(r);
    }
    FitOptions raw;
    raw.standardize = false;
    auto fit_std = fit_logistic(rows);
    auto fit_raw = fit_logistic(rows, raw);
    for (const auto& r : rows) {
        CHECK(predict(fit_std, r) == doctest::Approx(predict(fit_raw, r)).epsilon(1e-8));
    }
}

TEST_CASE("fitted mean probability equals the empirical rate (score equation)") {
    Rng rng(77);
    std::vector<RegressionRow> rows;
    int positives = 0;
    for (int i = 0; i < 600; ++i) {
        double x = rng.next_double() * 4.0 - 2.0;
        int y = rng.next_double() < 1.0 / (1.0 + std::exp(-x)) ? 1 : 0;
        positives += y;
        rows.push_back(row_with(y, x));
    }
    auto fit = fit_logistic(rows);
    double mean_pred = 0;
    for (const auto& r : rows) mean_pred += predict(fit, r);
    mean_pred /= static_cast<double>(rows.size());
    CHECK(mean_pred ==
          doctest::Approx(static_cast<double>(positives) / rows.size()).epsilon(1e-8));
}

TEST_CASE("heldout_eval: constant 0.5 predictor scores log-loss ln 2") {
    FitResult fit;
    fit.coefficients.push_back({"intercept", 0.0, 0, 0, 1});
    std::vector<RegressionRow> rows;
    for (int i = 0; i < 10; ++i) rows.push_back(row_with(i % 2));
    auto m = heldout_eval(fit, rows);
    CHECK(m.log_loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(m.n == 10);

    // A near-perfect predictor drives log-loss toward zero.
    FitResult sharp;
    sharp.coefficients.push_back({"intercept", 0.0, 0, 0, 1});
    sharp.coefficients.push_back({"input_logprob", 50.0, 0, 0, 1});
    std::vector<RegressionRow> separable;
    for (int i = 0; i < 10; ++i) separable.push_back(row_with(i % 2, i % 2 ? 1.0 : -1.0));
    CHECK(heldout_eval(sharp, separable).log_loss < 1e-6);
    CHECK(heldout_eval(sharp, separable).accuracy == 1.0);
}

TEST_CASE("build_design fills rows from transcripts, scores and the frequency table") {
    auto freq = FrequencyTable::from_pairs({{13, 6.0}, {25, 2.0}});
    UniformScorer scorer;
    std::vector<CipherExample> examples{CipherExample::make("mariner", ShiftLevel(25), 1, "eval"),
                                        CipherExample::make("xcbrouw", ShiftLevel(7), 5,
                                                            "heldout")};
    std::vector<AnalyzedRecord> records;
    for (const auto& ex : examples) {
        std::string raw = "Original text: \"" + ex.plaintext + "\"";
        records.push_back(analyze_one(raw, PromptVariant::TextCoT, ex));
    }
    auto rows = build_design(records, examples, scorer, freq);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].correct == 1);
    CHECK(rows[0].shift_level == 25.0);
    CHECK(rows[0].min_steps == 1.0);  // min(25, 26 - 25)
    CHECK(rows[0].shift_freq == doctest::Approx(0.25));
    CHECK(rows[0].input_logprob == doctest::Approx(scorer.score_word(examples[0].encoded)));
    CHECK(rows[0].output_logprob == doctest::Approx(scorer.score_word("mariner")));
    CHECK(rows[0].split == "eval");
    CHECK(rows[1].shift_freq == 0.0);  // missing shift reads as zero
    CHECK(rows[1].min_steps == 7.0);
    CHECK(rows[1].split == "heldout");

    std::vector<CipherExample> empty;
    CHECK_THROWS_AS(build_design(records, empty, scorer, freq), MissingPredictor);
}

TEST_CASE("fit report JSON carries the documented schema") {
    std::vector<RegressionRow> rows;
    for (int i = 0; i < 30; ++i) rows.push_back(row_with(i % 3 != 0, i * 0.1));
    auto fit = fit_logistic(rows);
    auto json_text = fit_report_json(fit, std::nullopt);
    CHECK(json_text.find("\"coefficients\"") != std::string::npos);
    CHECK(json_text.find("\"intercept\"") != std::string::npos);
    CHECK(json_text.find("\"loglik\"") != std::string::npos);
    CHECK(json_text.find("\"converged\"") != std::string::npos);
    CHECK(json_text.find("\"se\"") != std::string::npos);
}
