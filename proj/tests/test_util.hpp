#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "stopgame/game.hpp"
#include "stopgame/observation.hpp"
#include "stopgame/rng.hpp"
#include "stopgame/strategy.hpp"

namespace stopgame::test {

// Fixed-probability attacker used as an opponent or belief model.
class ConstAttacker final : public AttackerPolicy {
public:
    ConstAttacker(double stop_in_0, double stop_in_1) : p0_(stop_in_0), p1_(stop_in_1) {}
    double stop_prob(int, double, State s) const override {
        return s == State::Intrusion ? p1_ : p0_;
    }

private:
    double p0_;
    double p1_;
};

class ConstDefender final : public DefenderPolicy {
public:
    explicit ConstDefender(double stop) : p_(stop) {}
    double stop_prob(int, double) const override { return p_; }

private:
    double p_;
};

inline DiscretePmf normalized(std::vector<double> weights) {
    double sum = 0.0;
    for (double w : weights) sum += w;
    for (double& w : weights) w /= sum;
    return DiscretePmf{std::move(weights)};
}

// Discretized Gaussian pair with a common sigma; the shared variance gives a
// monotone likelihood ratio, so the model is TP-2 by construction.
inline ObservationModel gaussian_pair_model(int alphabet, double mean0, double mean1,
                                            double sigma) {
    std::vector<double> w0(static_cast<std::size_t>(alphabet));
    std::vector<double> w1(static_cast<std::size_t>(alphabet));
    for (int o = 0; o < alphabet; ++o) {
        w0[static_cast<std::size_t>(o)] = std::exp(-0.5 * std::pow((o - mean0) / sigma, 2));
        w1[static_cast<std::size_t>(o)] = std::exp(-0.5 * std::pow((o - mean1) / sigma, 2));
    }
    return ObservationModel(normalized(std::move(w0)), normalized(std::move(w1)));
}

// Random TP-2 model: exponential tilt f1(o) ~ f0(o) * exp(kappa * o) of a
// random positive base pmf keeps the likelihood ratio monotone.
inline ObservationModel random_tp2_model(int alphabet, Rng& rng, double kappa_max = 0.6) {
    std::vector<double> base(static_cast<std::size_t>(alphabet));
    for (double& w : base) w = 0.05 + rng.uniform();
    const double kappa = 0.05 + rng.uniform() * kappa_max;
    std::vector<double> tilted(base.size());
    for (int o = 0; o < alphabet; ++o) {
        tilted[static_cast<std::size_t>(o)] =
            base[static_cast<std::size_t>(o)] * std::exp(kappa * (o - alphabet / 2.0));
    }
    return ObservationModel(normalized(std::move(base)), normalized(std::move(tilted)));
}

inline ThresholdVector random_threshold_vector(Player player, int L, Rng& rng, double scale = 2.0) {
    ThresholdVector tv;
    tv.player = player;
    const int dim = player == Player::Defender ? L : 2 * L;
    tv.theta.resize(static_cast<std::size_t>(dim));
    for (double& v : tv.theta) v = (rng.uniform() * 2.0 - 1.0) * scale;
    return tv;
}

inline MixedThresholdStrategy random_mixture(Player player, int L, int atoms, Rng& rng) {
    std::vector<ThresholdVector> vs;
    vs.reserve(static_cast<std::size_t>(atoms));
    for (int i = 0; i < atoms; ++i) vs.push_back(random_threshold_vector(player, L, rng));
    return MixedThresholdStrategy::uniform(std::move(vs));
}

// Informative desk-scale model used across the end-to-end tests.
inline ObservationModel desk_model(int alphabet = 10) {
    return gaussian_pair_model(alphabet, 2.0, 6.0, 1.5);
}

inline GameConfig desk_config(int L = 3) {
    GameConfig cfg = GameConfig::defaults(L);
    cfg.t_max = 200;
    return cfg;
}

}  // namespace stopgame::test
