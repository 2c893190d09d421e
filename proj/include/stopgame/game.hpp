#pragma once

#include <stdexcept>
#include <vector>

#include "stopgame/observation.hpp"
#include "stopgame/policy.hpp"
#include "stopgame/rng.hpp"

namespace stopgame {

// Scalar game parameters. Defaults follow the reference instance:
// L=7, R_st=20, R_cost=-2, R_int=-1, gamma=0.99, phi_l = 1/(2l), t_max=200.
struct GameConfig {
    int L = 7;
    double R_st = 20.0;
    double R_cost = -2.0;
    double R_int = -1.0;
    double gamma = 0.99;
    std::vector<double> phi;  // phi[l-1] = intrusion-stop probability at l stops remaining
    int t_max = 200;

    static GameConfig defaults(int L = 7);

    double phi_at(int l) const { return phi[static_cast<std::size_t>(l - 1)]; }
    double max_abs_reward() const;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Raised when a belief update conditions on an observation that has zero
// probability under the defender's model.
class DegenerateUpdateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class BeliefFallback {
    Error,          // throw DegenerateUpdateError
    CarryForward,   // keep the prior belief
    LikelihoodOnly, // condition on the observation alone, uniform live prior
};

struct BeliefUpdateResult {
    double b1 = 0.0;
    bool degenerate = false;
};

// Predicted mass on the live next states {0,1} given the prior belief, the
// defender action just played, and the assumed attacker strategy. This is
// the belief update before the observation factor.
struct LiveMass {
    double m0 = 0.0;
    double m1 = 0.0;
};

LiveMass predicted_live_mass(double b1, Action a_d, const AttackerPolicy& attacker_model, int l,
                             const GameConfig& cfg);

// Applies the observation factor to a predicted mass and renormalizes over
// the live states. The normalizer m0*f(o|0) + m1*f(o|1) is the probability
// that o is observed and the game is still live. prior_b1 is returned under
// the CarryForward fallback.
BeliefUpdateResult posterior_from_mass(const LiveMass& mass, double prior_b1, int o,
                                       const ObservationModel& obs, BeliefFallback fallback);

// P(s_next | s, a, l). For fixed (s, a, l) the values over s_next sum to 1.
double transition_prob(State s, State s_next, ActionPair a, int l, const GameConfig& cfg);

State sample_transition(State s, ActionPair a, int l, const GameConfig& cfg, Rng& rng);

// Defender reward r(s, a, l); the attacker's reward is its negation.
double reward(State s, ActionPair a, int l, const GameConfig& cfg);

// Bayes update of b1 after the defender played a_D and observed o, assuming
// the attacker follows attacker_model. Conditions on the game being live:
// the sum runs over next states {0,1} and is renormalized.
double belief_update(double b1, Action a_d, int o, const AttackerPolicy& attacker_model,
                     int l, const ObservationModel& obs, const GameConfig& cfg);

BeliefUpdateResult belief_update_with_fallback(double b1, Action a_d, int o,
                                               const AttackerPolicy& attacker_model, int l,
                                               const ObservationModel& obs,
                                               const GameConfig& cfg, BeliefFallback fallback);

}  // namespace stopgame
