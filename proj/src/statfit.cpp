#include "shiftprobe/statfit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "shiftprobe/errors.hpp"

namespace shiftprobe {

namespace {

// log(1 + e^x), overflow-safe.
double log1pexp(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Two-sided normal p-value for a Wald z statistic.
double wald_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

// Dense symmetric solve / inverse by Gauss-Jordan with partial pivoting.
// Sizes here are tiny (<= 6x6).
std::vector<std::vector<double>> invert(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        if (std::fabs(a[pivot][col]) < 1e-12) {
            throw SingularDesign("information matrix is singular at column " +
                                 std::to_string(col));
        }
        std::swap(a[pivot], a[col]);
        std::swap(inv[pivot], inv[col]);
        double d = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

std::vector<double> solve(const std::vector<std::vector<double>>& a,
                          const std::vector<double>& b) {
    auto inv = invert(a);
    const std::size_t n = b.size();
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) x[i] += inv[i][j] * b[j];
    }
    return x;
}

struct Design {
    std::vector<std::vector<double>> x;  // n rows, p columns; intercept first
    std::vector<int> y;
    std::vector<std::string> names;      // per column
    std::vector<double> mean;            // standardization transform per column
    std::vector<double> scale;
    std::vector<std::string> dropped;    // zero-variance predictors
};

Design assemble(const std::vector<RegressionRow>& rows, bool standardize) {
    const auto& names = RegressionRow::predictor_names();
    const std::size_t n = rows.size();
    const std::size_t p_all = names.size();

    std::vector<std::vector<double>> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        raw[i] = rows[i].predictors();
        for (double v : raw[i]) {
            if (!std::isfinite(v)) throw MissingPredictor("non-finite predictor in row");
        }
    }

    // Zero-variance predictors carry no information; drop them so degenerate
    // designs (e.g. intercept-only tests) stay fittable.
    std::vector<std::size_t> keep;
    std::vector<std::string> dropped;
    for (std::size_t j = 0; j < p_all; ++j) {
        bool constant = true;
        for (std::size_t i = 1; i < n && constant; ++i) constant = raw[i][j] == raw[0][j];
        if (constant) {
            dropped.push_back(names[j]);
        } else {
            keep.push_back(j);
        }
    }

    Design d;
    d.dropped = std::move(dropped);
    d.names.push_back("intercept");
    for (std::size_t j : keep) d.names.push_back(names[j]);

    const std::size_t p = keep.size() + 1;
    d.mean.assign(p, 0.0);
    d.scale.assign(p, 1.0);
    if (standardize) {
        for (std::size_t c = 1; c < p; ++c) {
            std::size_t j = keep[c - 1];
            double m = 0.0;
            for (std::size_t i = 0; i < n; ++i) m += raw[i][j];
            m /= static_cast<double>(n);
            double v = 0.0;
            for (std::size_t i = 0; i < n; ++i) v += (raw[i][j] - m) * (raw[i][j] - m);
            v /= static_cast<double>(n);
            d.mean[c] = m;
            d.scale[c] = std::sqrt(v);
        }
    }

    d.x.assign(n, std::vector<double>(p, 1.0));
    d.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.y[i] = rows[i].correct;
        for (std::size_t c = 1; c < p; ++c) {
            std::size_t j = keep[c - 1];
            d.x[i][c] = (raw[i][j] - d.mean[c]) / d.scale[c];
        }
    }
    return d;
}

// Accumulated in long double so the gradient can actually reach the 1e-10
// max-norm tolerance at n ~ 10^4.
double loglik(const Design& d, const std::vector<double>& beta, double ridge) {
    long double ll = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        double eta = 0.0;
        for (std::size_t j = 0; j < beta.size(); ++j) eta += d.x[i][j] * beta[j];
        // y*eta - log(1 + e^eta)
        ll += d.y[i] * eta - log1pexp(eta);
    }
    for (std::size_t j = 1; j < beta.size(); ++j) ll -= 0.5L * ridge * beta[j] * beta[j];
    return static_cast<double>(ll);
}

}  // namespace

const std::vector<std::string>& RegressionRow::predictor_names() {
    static const std::vector<std::string> names{"input_logprob", "output_logprob", "shift_freq",
                                                "shift_level", "min_steps"};
    return names;
}

std::vector<RegressionRow> build_design(const std::vector<AnalyzedRecord>& records,
                                        const std::vector<CipherExample>& examples,
                                        const ScorerClient& scorer, const FrequencyTable& freq) {
    std::unordered_map<std::string, const CipherExample*> by_id;
    by_id.reserve(examples.size());
    for (const auto& e : examples) by_id[e.id] = &e;

    std::unordered_map<std::string, double> score_cache;
    auto cached_score = [&](const std::string& word) {
        auto it = score_cache.find(word);
        if (it != score_cache.end()) return it->second;
        double v = score_word(scorer, word);
        score_cache.emplace(word, v);
        return v;
    };

    std::vector<RegressionRow> rows;
    rows.reserve(records.size());
    for (const auto& r : records) {
        auto it = by_id.find(r.example_id);
        if (it == by_id.end()) {
            throw MissingPredictor("no example for transcript id " + r.example_id);
        }
        const CipherExample& ex = *it->second;
        RegressionRow row;
        row.correct = r.quad.final_correct ? 1 : 0;
        row.input_logprob = cached_score(ex.encoded);
        row.output_logprob = cached_score(ex.plaintext);
        row.shift_freq = freq.normalized(ex.shift);
        row.shift_level = static_cast<double>(ex.shift);
        row.min_steps = static_cast<double>(ShiftLevel(ex.shift).min_steps());
        row.split = ex.split;
        rows.push_back(std::move(row));
    }
    return rows;
}

FitResult fit_logistic(const std::vector<RegressionRow>& rows, const FitOptions& options) {
    if (rows.empty()) throw Error("cannot fit on an empty design");
    bool any0 = false, any1 = false;
    for (const auto& r : rows) (r.correct ? any1 : any0) = true;
    if ((!any0 || !any1) && options.ridge <= 0.0) {
        throw SeparationError(
            "outcomes are all " + std::string(any1 ? "1" : "0") +
            ": likelihood is unbounded; refit with a ridge penalty (options.ridge > 0)");
    }

    Design d = assemble(rows, options.standardize);
    const std::size_t n = d.x.size();
    const std::size_t p = d.names.size();

    std::vector<double> beta(p, 0.0);
    double ll = loglik(d, beta, options.ridge);

    FitResult fit;
    fit.loglik_trace.push_back(ll);
    fit.standardized = options.standardize;
    fit.se_approximate = options.ridge > 0.0;
    fit.n = static_cast<long>(n);

    std::vector<std::vector<double>> info(p, std::vector<double>(p, 0.0));
    int iter = 0;
    for (; iter < options.max_iter; ++iter) {
        std::vector<long double> grad(p, 0.0L);
        for (auto& row : info) std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double eta = 0.0;
            for (std::size_t j = 0; j < p; ++j) eta += d.x[i][j] * beta[j];
            double mu = sigmoid(eta);
            double w = mu * (1.0 - mu);
            double resid = d.y[i] - mu;
            for (std::size_t j = 0; j < p; ++j) {
                grad[j] += static_cast<long double>(d.x[i][j]) * resid;
                for (std::size_t k = j; k < p; ++k) info[j][k] += w * d.x[i][j] * d.x[i][k];
            }
        }
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t k = 0; k < j; ++k) info[j][k] = info[k][j];
        }
        std::vector<double> grad_d(p);
        for (std::size_t j = 0; j < p; ++j) grad_d[j] = static_cast<double>(grad[j]);
        for (std::size_t j = 1; j < p; ++j) {
            grad_d[j] -= options.ridge * beta[j];
            info[j][j] += options.ridge;
        }

        double gmax = 0.0;
        for (double g : grad_d) gmax = std::max(gmax, std::fabs(g));
        if (gmax < options.tol) {
            fit.converged = true;
            break;
        }

        std::vector<double> delta = solve(info, grad_d);

        // Step-halving keeps the (penalized) log-likelihood non-decreasing.
        double step = 1.0;
        std::vector<double> candidate(p);
        double new_ll = -1e300;
        for (int h = 0; h < 40; ++h) {
            for (std::size_t j = 0; j < p; ++j) candidate[j] = beta[j] + step * delta[j];
            new_ll = loglik(d, candidate, options.ridge);
            if (new_ll >= ll - 1e-12) break;
            step *= 0.5;
        }
        if (new_ll < ll - 1e-12) break;  // no ascent direction left
        beta = candidate;
        ll = new_ll;
        fit.loglik_trace.push_back(ll);

        if (options.ridge <= 0.0) {
            double bmax = 0.0;
            for (std::size_t j = 1; j < p; ++j) bmax = std::max(bmax, std::fabs(beta[j]));
            if (bmax > 1e4) {
                throw SeparationError(
                    "coefficients diverging (complete separation); refit with a ridge penalty");
            }
        }
    }
    fit.iterations = iter;
    fit.loglik = ll;

    // Complete separation: every case fitted to its label. The likelihood is
    // unbounded there and Wald errors are meaningless without a penalty.
    if (options.ridge <= 0.0 && p > 1) {
        bool saturated = true;
        for (std::size_t i = 0; i < n && saturated; ++i) {
            double eta = 0.0;
            for (std::size_t j = 0; j < p; ++j) eta += d.x[i][j] * beta[j];
            double mu = sigmoid(eta);
            saturated = d.y[i] == 1 ? mu >= 1.0 - 1e-8 : mu <= 1e-8;
        }
        if (saturated) {
            throw SeparationError(
                "data are completely separated; refit with a ridge penalty (options.ridge > 0)");
        }
    }

    // Covariance on the standardized scale, then mapped back through the
    // affine transform beta_orig = T beta_std.
    auto cov = invert(info);
    std::vector<std::vector<double>> t(p, std::vector<double>(p, 0.0));
    t[0][0] = 1.0;
    for (std::size_t j = 1; j < p; ++j) {
        t[0][j] = -d.mean[j] / d.scale[j];
        t[j][j] = 1.0 / d.scale[j];
    }
    std::vector<double> beta_orig(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) beta_orig[i] += t[i][j] * beta[j];
    }
    std::vector<std::vector<double>> cov_orig(p, std::vector<double>(p, 0.0));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            double acc = 0.0;
            for (std::size_t a = 0; a < p; ++a) {
                for (std::size_t b = 0; b < p; ++b) acc += t[i][a] * cov[a][b] * t[j][b];
            }
            cov_orig[i][j] = acc;
        }
    }

    for (std::size_t j = 0; j < p; ++j) {
        Coefficient c;
        c.name = d.names[j];
        c.coef = beta_orig[j];
        c.se = std::sqrt(std::max(0.0, cov_orig[j][j]));
        c.z = c.se > 0.0 ? c.coef / c.se : 0.0;
        c.p = wald_p(c.z);
        fit.coefficients.push_back(std::move(c));
    }
    for (const auto& name : d.dropped) {
        Coefficient c;
        c.name = name;
        c.coef = 0.0;
        c.se = 0.0;
        c.z = 0.0;
        c.p = 1.0;
        fit.coefficients.push_back(std::move(c));
    }
    return fit;
}

double predict(const FitResult& fit, const RegressionRow& row) {
    const auto& names = RegressionRow::predictor_names();
    auto values = row.predictors();
    double eta = 0.0;
    for (const auto& c : fit.coefficients) {
        if (c.name == "intercept") {
            eta += c.coef;
            continue;
        }
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (names[j] == c.name) {
                eta += c.coef * values[j];
                break;
            }
        }
    }
    return sigmoid(eta);
}

HeldoutMetrics heldout_eval(const FitResult& fit, const std::vector<RegressionRow>& rows) {
    HeldoutMetrics m;
    if (rows.empty()) return m;
    for (const auto& r : rows) {
        double mu = predict(fit, r);
        mu = std::clamp(mu, 1e-15, 1.0 - 1e-15);
        m.log_loss -= r.correct ? std::log(mu) : std::log(1.0 - mu);
        if ((mu >= 0.5 ? 1 : 0) == r.correct) m.accuracy += 1.0;
    }
    m.n = static_cast<long>(rows.size());
    m.log_loss /= static_cast<double>(m.n);
    m.accuracy /= static_cast<double>(m.n);
    return m;
}

std::string fit_report_json(const FitResult& fit, const std::optional<HeldoutMetrics>& heldout) {
    nlohmann::json j;
    j["n"] = fit.n;
    j["loglik"] = fit.loglik;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["standardized"] = fit.standardized;
    j["se_approximate"] = fit.se_approximate;
    nlohmann::json coefs = nlohmann::json::object();
    for (const auto& c : fit.coefficients) {
        coefs[c.name] = {{"coef", c.coef}, {"se", c.se}, {"z", c.z}, {"p", c.p}};
    }
    j["coefficients"] = coefs;
    if (heldout) {
        j["heldout"] = {{"log_loss", heldout->log_loss},
                        {"accuracy", heldout->accuracy},
                        {"n", heldout->n}};
    } else {
        j["heldout"] = nullptr;
    }
    return j.dump(2);
}

std::vector<PredictionCurvePoint> prediction_curve(const FitResult& fit,
                                                   const std::vector<RegressionRow>& rows,
                                                   const std::vector<AnalyzedRecord>& records) {
    if (rows.size() != records.size()) throw Error("rows/records size mismatch");
    std::map<std::pair<int, int>, std::pair<double, long>> acc;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& cell = acc[{records[i].shift, records[i].bin}];
        cell.first += predict(fit, rows[i]);
        cell.second++;
    }
    std::vector<PredictionCurvePoint> out;
    out.reserve(acc.size());
    for (const auto& [key, val] : acc) {
        out.push_back(PredictionCurvePoint{key.first, key.second,
                                           val.first / static_cast<double>(val.second)});
    }
    return out;
}

}  // namespace shiftprobe
