#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stopgame/game.hpp"
#include "stopgame/policy.hpp"
#include "stopgame/strategy.hpp"

namespace stopgame {

enum class TerminalReason {
    FinalDefenderStop,
    IntrusionStoppedByChance,
    AttackerAborted,
    Truncated,
};

const char* to_string(TerminalReason reason);

struct EpisodeStep {
    int t = 1;
    State s = State::NoIntrusion;
    double b1 = 0.0;
    int l = 1;
    Action a_d = Action::Continue;
    Action a_a = Action::Continue;
    std::optional<int> o;  // none when the transition landed in the terminal state
    double r = 0.0;
};

struct EpisodeTrace {
    std::vector<EpisodeStep> steps;
    TerminalReason terminal_reason = TerminalReason::Truncated;
    double discounted_return = 0.0;
    std::optional<int> intrusion_start;
    int intrusion_length = 0;  // steps with s == Intrusion
    int degenerate_updates = 0;
};

struct ObjectiveEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int n_episodes = 0;
    std::pair<double, double> ci95{0.0, 0.0};
};

struct SimOptions {
    BeliefFallback fallback = BeliefFallback::CarryForward;
    int threads = 1;
};

// Plays one episode from (s=0, b1=0, l=L). Each step both players act
// simultaneously; the observation driving the belief update is drawn from
// the state after the transition, and none is emitted when the transition
// lands in the terminal state. attacker_belief_model is the attacker
// strategy the defender assumes in the belief update; it may differ from
// the actual attacker (e.g. during exploitability evaluation).
EpisodeTrace run_episode(const GameConfig& cfg, const ObservationModel& obs,
                         const DefenderAgent& defender, const AttackerPolicy& attacker,
                         const AttackerPolicy& attacker_belief_model, Rng& rng,
                         BeliefFallback fallback = BeliefFallback::CarryForward);

// Sample mean / standard error of the discounted return over n_episodes
// independent streams derived from (seed, episode index). The attacker
// objective estimate is the negation of the mean.
ObjectiveEstimate estimate_objective(const GameConfig& cfg, const ObservationModel& obs,
                                     const DefenderAgent& defender, const AttackerPolicy& attacker,
                                     const AttackerPolicy& attacker_belief_model, int n_episodes,
                                     std::uint64_t seed, const SimOptions& options = {});

std::vector<EpisodeTrace> run_episodes(const GameConfig& cfg, const ObservationModel& obs,
                                       const DefenderAgent& defender,
                                       const AttackerPolicy& attacker,
                                       const AttackerPolicy& attacker_belief_model,
                                       int n_episodes, std::uint64_t seed,
                                       const SimOptions& options = {});

struct EpisodeSummary {
    double mean_return = 0.0;
    double mean_intrusion_length = 0.0;
    double mean_episode_length = 0.0;
    std::vector<int> stop_time_histogram;  // defender stops per time-step, index t-1
};

EpisodeSummary episode_stats(const std::vector<EpisodeTrace>& traces);

}  // namespace stopgame
