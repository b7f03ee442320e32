#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shiftprobe/analysis.hpp"
#include "shiftprobe/dataset.hpp"
#include "shiftprobe/scorer.hpp"

namespace shiftprobe {

// One observation of the regression
//   correct ~ input_logprob + output_logprob + shift_freq + shift_level
//             + min(shift_level, 26 - shift_level)
struct RegressionRow {
    int correct = 0;
    double input_logprob = 0.0;
    double output_logprob = 0.0;
    double shift_freq = 0.0;
    double shift_level = 0.0;
    double min_steps = 0.0;
    std::string split;

    std::vector<double> predictors() const {
        return {input_logprob, output_logprob, shift_freq, shift_level, min_steps};
    }
    static const std::vector<std::string>& predictor_names();
};

struct Coefficient {
    std::string name;
    double coef = 0.0;
    double se = 0.0;
    double z = 0.0;
    double p = 0.0;
};

struct FitResult {
    std::vector<Coefficient> coefficients;  // intercept first
    double loglik = 0.0;
    std::vector<double> loglik_trace;  // per accepted Newton iteration
    int iterations = 0;
    bool converged = false;
    bool standardized = false;
    bool se_approximate = false;  // set when a ridge penalty was used
    long n = 0;
};

// Design rows from analyzed transcripts. input_logprob scores the encoded
// text and output_logprob the plaintext, both through the quoted-word
// protocol; shift_freq is the normalized table value (0 when missing).
std::vector<RegressionRow> build_design(const std::vector<AnalyzedRecord>& records,
                                        const std::vector<CipherExample>& examples,
                                        const ScorerClient& scorer, const FrequencyTable& freq);

struct FitOptions {
    int max_iter = 100;
    double tol = 1e-10;   // max |gradient|
    double ridge = 0.0;   // L2 penalty; rescue for separated data
    bool standardize = true;
};

// Newton-Raphson with step-halving on the Bernoulli log-likelihood.
// Standard errors come from the inverse observed information; Wald z and
// two-sided normal p-values. Coefficients are reported on the original
// predictor scale even when fitted standardized.
FitResult fit_logistic(const std::vector<RegressionRow>& rows, const FitOptions& options = {});

// sigma(x' beta) for one row.
double predict(const FitResult& fit, const RegressionRow& row);

struct HeldoutMetrics {
    double log_loss = 0.0;  // mean negative log-likelihood
    double accuracy = 0.0;  // thresholded at 0.5
    long n = 0;
};

HeldoutMetrics heldout_eval(const FitResult& fit, const std::vector<RegressionRow>& rows);

std::string fit_report_json(const FitResult& fit, const std::optional<HeldoutMetrics>& heldout);

// Mean predicted accuracy per (shift, bin) for overlay plots.
struct PredictionCurvePoint {
    int shift = 0;
    int bin = 0;
    double predicted_acc = 0.0;
};
std::vector<PredictionCurvePoint> prediction_curve(const FitResult& fit,
                                                   const std::vector<RegressionRow>& rows,
                                                   const std::vector<AnalyzedRecord>& records);

}  // namespace shiftprobe
