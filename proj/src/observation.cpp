#include "stopgame/observation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace stopgame {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kVarianceFloor = 1e-3;
constexpr double kKlSmoothing = 1e-9;

double log_normal_pdf(double x, double mean, double stddev) {
    const double z = (x - mean) / stddev;
    return -0.5 * z * z - std::log(stddev) - 0.5 * std::log(kTwoPi);
}

double log_sum_exp(const std::vector<double>& xs) {
    const double m = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - m);
    return m + std::log(acc);
}

}  // namespace

void DiscretePmf::validate() const {
    if (probs.empty()) throw std::invalid_argument("pmf must be non-empty");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("pmf entries must be >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("pmf must sum to 1 within 1e-9");
    }
}

ObservationModel::ObservationModel(DiscretePmf pmf0, DiscretePmf pmf1)
    : pmf0_(std::move(pmf0)), pmf1_(std::move(pmf1)) {
    pmf0_.validate();
    pmf1_.validate();
    if (pmf0_.size() != pmf1_.size()) {
        throw std::invalid_argument("observation pmfs must share the alphabet");
    }
}

const DiscretePmf& ObservationModel::pmf(State s) const {
    switch (s) {
        case State::NoIntrusion: return pmf0_;
        case State::Intrusion: return pmf1_;
        case State::Terminal: break;
    }
    throw std::invalid_argument("no observation is emitted in the terminal state");
}

int sample_observation(const ObservationModel& model, State s, Rng& rng) {
    const DiscretePmf& pmf = model.pmf(s);  // rejects Terminal
    return rng.categorical(pmf.probs);
}

double GmmParams::log_density(double x) const {
    std::vector<double> terms;
    terms.reserve(components.size());
    for (const GmmComponent& c : components) {
        if (c.weight <= 0.0) continue;
        terms.push_back(std::log(c.weight) + log_normal_pdf(x, c.mean, c.stddev));
    }
    if (terms.empty()) return -std::numeric_limits<double>::infinity();
    return log_sum_exp(terms);
}

double GmmParams::density(double x) const { return std::exp(log_density(x)); }

DiscretePmf discretize_gmm(const GmmParams& params, int alphabet_size) {
    if (alphabet_size < 2) throw std::invalid_argument("alphabet_size must be >= 2");
    std::vector<double> logs(static_cast<std::size_t>(alphabet_size));
    for (int o = 0; o < alphabet_size; ++o) {
        logs[static_cast<std::size_t>(o)] = params.log_density(static_cast<double>(o));
    }
    const double m = *std::max_element(logs.begin(), logs.end());
    if (!std::isfinite(m)) {
        throw std::invalid_argument("mixture has no mass on the alphabet");
    }
    DiscretePmf pmf;
    pmf.probs.resize(logs.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        pmf.probs[i] = std::exp(logs[i] - m);
        sum += pmf.probs[i];
    }
    for (double& p : pmf.probs) p /= sum;
    return pmf;
}

GmmFitResult fit_gmm_em(const std::vector<double>& samples, int k, int alphabet_size) {
    if (k < 1) throw std::invalid_argument("component count must be >= 1");
    if (alphabet_size < 2) throw std::invalid_argument("alphabet_size must be >= 2");
    const int n = static_cast<int>(samples.size());
    if (n < 10 * k) {
        throw std::invalid_argument("need at least 10*k samples to fit " + std::to_string(k) +
                                    " components");
    }
    for (double x : samples) {
        if (!std::isfinite(x)) throw std::invalid_argument("samples must be finite");
    }

    // Quantile-spread means, pooled variance, uniform weights.
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    double var = 0.0;
    for (double x : sorted) var += (x - mean) * (x - mean);
    var = std::max(var / n, kVarianceFloor);

    GmmParams params;
    params.components.resize(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        const double q = (j + 0.5) / k;
        const auto idx = static_cast<std::size_t>(q * (n - 1));
        params.components[static_cast<std::size_t>(j)] = {1.0 / k, sorted[idx], std::sqrt(var)};
    }

    constexpr int kMaxIterations = 200;
    constexpr double kRelTol = 1e-6;

    auto total_log_likelihood = [&](const GmmParams& p) {
        double ll = 0.0;
        for (double x : samples) ll += p.log_density(x);
        return ll;
    };

    GmmFitResult result;
    result.params = params;
    result.log_likelihood = total_log_likelihood(params);
    result.log_likelihood_trace.push_back(result.log_likelihood);
    double prev_ll = result.log_likelihood;

    std::vector<double> resp(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        // E step: responsibilities via log-space normalization.
        for (int i = 0; i < n; ++i) {
            std::vector<double> logs(static_cast<std::size_t>(k),
                                     -std::numeric_limits<double>::infinity());
            for (int j = 0; j < k; ++j) {
                const GmmComponent& c = params.components[static_cast<std::size_t>(j)];
                if (c.weight > 0.0) {
                    logs[static_cast<std::size_t>(j)] =
                        std::log(c.weight) + log_normal_pdf(samples[static_cast<std::size_t>(i)],
                                                            c.mean, c.stddev);
                }
            }
            const double lse = log_sum_exp(logs);
            for (int j = 0; j < k; ++j) {
                resp[static_cast<std::size_t>(i) * k + j] =
                    std::isfinite(lse) ? std::exp(logs[static_cast<std::size_t>(j)] - lse)
                                       : 1.0 / k;
            }
        }
        // M step.
        for (int j = 0; j < k; ++j) {
            double nj = 0.0, mu = 0.0;
            for (int i = 0; i < n; ++i) {
                const double r = resp[static_cast<std::size_t>(i) * k + j];
                nj += r;
                mu += r * samples[static_cast<std::size_t>(i)];
            }
            GmmComponent& c = params.components[static_cast<std::size_t>(j)];
            if (nj <= 1e-12) {
                c.weight = 0.0;
                continue;
            }
            mu /= nj;
            double v = 0.0;
            for (int i = 0; i < n; ++i) {
                const double r = resp[static_cast<std::size_t>(i) * k + j];
                const double d = samples[static_cast<std::size_t>(i)] - mu;
                v += r * d * d;
            }
            c.weight = nj / n;
            c.mean = mu;
            c.stddev = std::sqrt(std::max(v / nj, kVarianceFloor));
        }

        const double ll = total_log_likelihood(params);
        result.iterations = iter;
        result.log_likelihood_trace.push_back(ll);
        if (ll >= result.log_likelihood) {
            result.log_likelihood = ll;
            result.params = params;
        }
        if (std::abs(ll - prev_ll) <= kRelTol * (std::abs(prev_ll) + 1.0)) {
            result.converged = true;
            break;
        }
        prev_ll = ll;
    }
    result.pmf = discretize_gmm(result.params, alphabet_size);
    return result;
}

Tp2Result tp2_check(const ObservationModel& model) {
    const int n = model.alphabet_size();
    const DiscretePmf& f0 = model.pmf0();
    const DiscretePmf& f1 = model.pmf1();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double minor = f0(i) * f1(j) - f0(j) * f1(i);
            if (minor < -1e-12) return {false, std::make_pair(i, j)};
        }
    }
    return {true, std::nullopt};
}

double kl_divergence(const DiscretePmf& p, const DiscretePmf& q) {
    if (p.size() != q.size()) throw std::invalid_argument("KL divergence: alphabet mismatch");
    const int n = p.size();
    const double denom = 1.0 + kKlSmoothing * n;
    double kl = 0.0;
    for (int o = 0; o < n; ++o) {
        const double ps = (p(o) + kKlSmoothing) / denom;
        const double qs = (q(o) + kKlSmoothing) / denom;
        kl += ps * std::log(ps / qs);
    }
    return std::max(kl, 0.0);
}

DiscretePmf empirical_pmf(const std::vector<int>& samples, int alphabet_size, double smoothing) {
    if (alphabet_size < 1) throw std::invalid_argument("alphabet_size must be >= 1");
    if (smoothing < 0.0) throw std::invalid_argument("smoothing must be >= 0");
    std::vector<double> counts(static_cast<std::size_t>(alphabet_size), 0.0);
    for (int s : samples) {
        if (s < 0 || s >= alphabet_size) {
            throw std::invalid_argument("sample symbol out of range: " + std::to_string(s));
        }
        counts[static_cast<std::size_t>(s)] += 1.0;
    }
    const double denom = static_cast<double>(samples.size()) + smoothing * alphabet_size;
    if (denom <= 0.0) {
        throw std::invalid_argument("empirical pmf needs samples or positive smoothing");
    }
    DiscretePmf pmf;
    pmf.probs.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        pmf.probs[i] = (counts[i] + smoothing) / denom;
    }
    return pmf;
}

}  // namespace stopgame
