#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stopgame/policy.hpp"
#include "stopgame/rng.hpp"

namespace stopgame {

// Probability mass function over the observation alphabet 0..size-1.
struct DiscretePmf {
    std::vector<double> probs;

    int size() const { return static_cast<int>(probs.size()); }
    double operator()(int o) const { return probs[static_cast<std::size_t>(o)]; }

    // Entries >= 0 and sum == 1 within 1e-9.
    void validate() const;
};

// The pair of conditional observation distributions, one per live state.
class ObservationModel {
public:
    ObservationModel(DiscretePmf pmf0, DiscretePmf pmf1);

    int alphabet_size() const { return pmf0_.size(); }
    const DiscretePmf& pmf(State s) const;
    const DiscretePmf& pmf0() const { return pmf0_; }
    const DiscretePmf& pmf1() const { return pmf1_; }
    double likelihood(int o, State s) const { return pmf(s)(o); }

private:
    DiscretePmf pmf0_;
    DiscretePmf pmf1_;
};

int sample_observation(const ObservationModel& model, State s, Rng& rng);

struct GmmComponent {
    double weight = 0.0;
    double mean = 0.0;
    double stddev = 1.0;
};

struct GmmParams {
    std::vector<GmmComponent> components;

    double log_density(double x) const;
    double density(double x) const;
};

struct GmmFitResult {
    GmmParams params;
    DiscretePmf pmf;  // mixture density at integer symbols, normalized
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;  // false: returned best iterate after max iterations
    std::vector<double> log_likelihood_trace;
};

// EM fit of a k-component univariate Gaussian mixture, discretized to the
// alphabet by point evaluation at integer symbols. Deterministic
// initialization: quantile-spread means, pooled variance, uniform weights.
GmmFitResult fit_gmm_em(const std::vector<double>& samples, int k, int alphabet_size);

// Discretize a mixture density onto {0,...,alphabet_size-1} and normalize.
DiscretePmf discretize_gmm(const GmmParams& params, int alphabet_size);

struct Tp2Result {
    bool is_tp2 = true;
    // First 2x2 minor det[[f0(i),f0(j)],[f1(i),f1(j)]] below -1e-12, if any.
    std::optional<std::pair<int, int>> violation;
};

// Exhaustive check of all second-order minors of the stacked (f0; f1) matrix.
Tp2Result tp2_check(const ObservationModel& model);

// KL(p || q) with symmetric additive smoothing eps=1e-9 on both arguments,
// so the result is finite on empirical pmfs and zero iff p == q.
double kl_divergence(const DiscretePmf& p, const DiscretePmf& q);

// (count(o) + smoothing) / (n + smoothing * alphabet_size)
DiscretePmf empirical_pmf(const std::vector<int>& samples, int alphabet_size, double smoothing);

}  // namespace stopgame
