#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stopgame/game.hpp"
#include "stopgame/oracle.hpp"
#include "stopgame/strategy.hpp"

namespace stopgame {

// Self-play hyperparameters. Gain defaults follow the reference instance:
// a=1, c=10, lambda=0.602, A=100, epsilon=0.101, N=50, delta=0.2.
struct SelfPlayConfig {
    double a = 1.0;
    double c = 10.0;
    double lambda = 0.602;   // exponent of the perturbation gain c_n
    double big_a = 100.0;    // stability offset A in a_n
    double epsilon = 0.101;  // exponent of the step gain a_n
    double delta = 0.2;      // termination exploitability
    int inner_iterations = 50;  // N gradient steps per best response
    int max_outer = 500;
    int br_episodes = 50;      // episodes per objective evaluation
    int eval_episodes = 500;   // episodes per exploitability term / history row
    int grid_points = 201;     // oracle grid for the exploitability metric
    // The published gain assignment puts the small exponent (epsilon) on a_n
    // and the large one (lambda) on c_n, the reverse of common practice.
    // true swaps them back to the standard assignment.
    bool swap_gain_exponents = false;
    // Replace the grid-oracle exploitability with learned approximate best
    // responses (slower, looser; the fidelity variant).
    bool learned_br_exploitability = false;
    int threads = 1;

    void validate() const;
};

struct SpsaGains {
    double a_n = 0.0;
    double c_n = 0.0;
};

// a_n = a/(n + A)^epsilon, c_n = c/n^lambda (exponents swap under
// swap_gain_exponents).
SpsaGains spsa_gains(int n, const SelfPlayConfig& h);

// Two-point simultaneous-perturbation gradient estimate: draws a Rademacher
// direction, evaluates the objective at theta +/- c_n * delta, and returns
// G_k = (R_high - R_low) / (2 c_n delta_k).
std::vector<double> spsa_gradient(const std::function<double(const std::vector<double>&)>& evaluate,
                                  const std::vector<double>& theta, double c_n, Rng& rng);

// One best-response learning pass (N steps of stochastic gradient ascent on
// the player's own objective from a random +/-1 initialization).
//
// player == Defender: opponent is the attacker strategy faced (also the
// defender's belief model); own_mixed is the defender mixture the opponent's
// thresholds are bound to.
// player == Attacker: opponent is the defender mixture (also what the
// candidate's thresholds are bound to); own_mixed is the attacker mixture
// the defender assumes in its belief update.
ThresholdVector learn_best_response(const GameConfig& cfg, const ObservationModel& obs,
                                    Player player, const MixedThresholdStrategy& opponent,
                                    const MixedThresholdStrategy& own_mixed,
                                    const SelfPlayConfig& h, Rng& rng);

// Variant taking an arbitrary opponent policy for the defender player
// (mixtures cannot express e.g. a never-attacking opponent exactly).
ThresholdVector learn_defender_best_response(const GameConfig& cfg, const ObservationModel& obs,
                                             const AttackerPolicy& opponent,
                                             const SelfPlayConfig& h, Rng& rng);

struct SelfPlayRecord {
    int iteration = 0;
    double exploitability = 0.0;
    double exploitability_std_error = 0.0;
    double j_defender = 0.0;
    double mean_episode_length = 0.0;
    double mean_intrusion_length = 0.0;
    int defender_buffer_size = 0;
    int attacker_buffer_size = 0;
};

struct SelfPlayHistory {
    std::vector<SelfPlayRecord> records;
    bool converged = false;  // hit delta before max_outer
};

struct SelfPlayResult {
    MixedThresholdStrategy defender;
    MixedThresholdStrategy attacker;
    SelfPlayHistory history;
};

using SelfPlayCallback = std::function<void(const SelfPlayRecord&, const MixedThresholdStrategy&,
                                            const MixedThresholdStrategy&)>;

// Fictitious self-play: alternating best-response learning, uniform
// empirical averaging of the threshold buffers, exploitability-based
// termination. The callback (optional) fires after each outer iteration.
SelfPlayResult run_self_play(const GameConfig& cfg, const ObservationModel& obs,
                             const SelfPlayConfig& h, std::uint64_t seed,
                             const SelfPlayCallback& callback = nullptr);

}  // namespace stopgame
