#pragma once

#include <optional>

namespace stopgame {

enum class Player { Defender, Attacker };

enum class State : int { NoIntrusion = 0, Intrusion = 1, Terminal = 2 };

enum class Action : int { Continue = 0, Stop = 1 };

struct ActionPair {
    Action defender = Action::Continue;
    Action attacker = Action::Continue;
};

// Belief-evaluable defender strategy: probability of Stop given the stops
// remaining l and the belief b1 = P(intrusion ongoing).
class DefenderPolicy {
public:
    virtual ~DefenderPolicy() = default;
    virtual double stop_prob(int l, double b1) const = 0;
};

// Attacker strategy: probability of Stop given (l, b1) and the true state
// s in {NoIntrusion, Intrusion}. The attacker observes the full state.
class AttackerPolicy {
public:
    virtual ~AttackerPolicy() = default;
    virtual double stop_prob(int l, double b1, State s) const = 0;
};

// Per-step context the simulator exposes to defender agents. Belief-based
// strategies use (l, b1); the baselines use the extra fields.
struct DefenderView {
    int t = 1;
    int l = 1;
    double b1 = 0.0;
    std::optional<int> last_obs;
    bool intrusion_started = false;  // privileged; only the oracle baseline reads it
    int stops_taken = 0;
};

class DefenderAgent {
public:
    virtual ~DefenderAgent() = default;
    virtual double stop_prob(const DefenderView& view) const = 0;
};

// Adapter: any belief-based defender strategy acts as a simulator agent.
class BeliefDefenderAgent final : public DefenderAgent {
public:
    explicit BeliefDefenderAgent(const DefenderPolicy& policy) : policy_(&policy) {}
    double stop_prob(const DefenderView& view) const override {
        return policy_->stop_prob(view.l, view.b1);
    }

private:
    const DefenderPolicy* policy_;
};

}  // namespace stopgame
