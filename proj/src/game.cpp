#include "stopgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stopgame {

namespace {

void check_l(int l, const GameConfig& cfg) {
    if (l < 1 || l > cfg.L) {
        throw std::invalid_argument("l out of range {1.." + std::to_string(cfg.L) +
                                    "}: " + std::to_string(l));
    }
}

bool is_stop(Action a) { return a == Action::Stop; }

}  // namespace

GameConfig GameConfig::defaults(int L) {
    GameConfig cfg;
    cfg.L = L;
    cfg.phi.resize(static_cast<std::size_t>(L));
    for (int l = 1; l <= L; ++l) {
        cfg.phi[static_cast<std::size_t>(l - 1)] = 1.0 / (2.0 * l);
    }
    return cfg;
}

double GameConfig::max_abs_reward() const {
    return std::max({std::abs(R_st), std::abs(R_cost), std::abs(R_int)});
}

void GameConfig::validate() const {
    if (L < 1) throw std::invalid_argument("L must be >= 1");
    if (!(R_st > 0.0)) throw std::invalid_argument("R_st must be > 0");
    if (!(R_cost < 0.0)) throw std::invalid_argument("R_cost must be < 0");
    if (!(R_int < 0.0)) throw std::invalid_argument("R_int must be < 0");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0,1)");
    if (t_max < 2) throw std::invalid_argument("t_max must be >= 2");
    if (static_cast<int>(phi.size()) != L) {
        throw std::invalid_argument("phi must have one entry per l in {1..L}");
    }
    for (int l = 1; l <= L; ++l) {
        const double p = phi_at(l);
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("phi(" + std::to_string(l) + ") must be in [0,1]");
        }
        // phi rises as stops are taken, so it is non-increasing in l.
        if (l > 1 && phi_at(l) > phi_at(l - 1) + 1e-12) {
            throw std::invalid_argument("phi must be non-increasing in l");
        }
    }
}

double transition_prob(State s, State s_next, ActionPair a, int l, const GameConfig& cfg) {
    check_l(l, cfg);
    // Absorbing terminal state.
    if (s == State::Terminal) return s_next == State::Terminal ? 1.0 : 0.0;
    // Defender's final stop ends the game regardless of anything else.
    if (is_stop(a.defender) && l == 1) return s_next == State::Terminal ? 1.0 : 0.0;
    // Attacker stop in state 1 terminates the intrusion.
    if (s == State::Intrusion && is_stop(a.attacker)) {
        return s_next == State::Terminal ? 1.0 : 0.0;
    }
    if (s == State::NoIntrusion) {
        const State target = is_stop(a.attacker) ? State::Intrusion : State::NoIntrusion;
        return s_next == target ? 1.0 : 0.0;
    }
    // s == Intrusion, attacker continues: stopped by chance with phi_l,
    // evaluated at the pre-action stop count.
    const double phi = cfg.phi_at(l);
    if (s_next == State::Intrusion) return 1.0 - phi;
    if (s_next == State::Terminal) return phi;
    return 0.0;
}

State sample_transition(State s, ActionPair a, int l, const GameConfig& cfg, Rng& rng) {
    check_l(l, cfg);
    if (s == State::Terminal) return State::Terminal;
    if (is_stop(a.defender) && l == 1) return State::Terminal;
    if (s == State::Intrusion && is_stop(a.attacker)) return State::Terminal;
    if (s == State::NoIntrusion) {
        return is_stop(a.attacker) ? State::Intrusion : State::NoIntrusion;
    }
    return rng.bernoulli(cfg.phi_at(l)) ? State::Terminal : State::Intrusion;
}

double reward(State s, ActionPair a, int l, const GameConfig& cfg) {
    check_l(l, cfg);
    if (s == State::Terminal) return 0.0;
    if (s == State::Intrusion) {
        if (is_stop(a.attacker)) return 0.0;  // (., S) takes precedence
        if (is_stop(a.defender)) return cfg.R_st / l;
        return cfg.R_int;
    }
    // s == NoIntrusion
    if (is_stop(a.defender)) return cfg.R_cost / l;
    return 0.0;
}

LiveMass predicted_live_mass(double b1, Action a_d, const AttackerPolicy& attacker_model, int l,
                             const GameConfig& cfg) {
    check_l(l, cfg);
    const double prior[2] = {1.0 - b1, b1};
    const State live[2] = {State::NoIntrusion, State::Intrusion};
    double mass[2] = {0.0, 0.0};
    for (int si = 0; si < 2; ++si) {
        if (prior[si] == 0.0) continue;
        const double p_stop = attacker_model.stop_prob(l, b1, live[si]);
        const double p_action[2] = {1.0 - p_stop, p_stop};
        for (int ai = 0; ai < 2; ++ai) {
            if (p_action[ai] == 0.0) continue;
            const ActionPair pair{a_d, ai == 1 ? Action::Stop : Action::Continue};
            for (int sj = 0; sj < 2; ++sj) {
                mass[sj] += prior[si] * p_action[ai] * transition_prob(live[si], live[sj], pair, l, cfg);
            }
        }
    }
    return {mass[0], mass[1]};
}

BeliefUpdateResult posterior_from_mass(const LiveMass& mass, double prior_b1, int o,
                                       const ObservationModel& obs, BeliefFallback fallback) {
    if (o < 0 || o >= obs.alphabet_size()) {
        throw std::invalid_argument("observation symbol out of range");
    }
    const double f0 = obs.likelihood(o, State::NoIntrusion);
    const double f1 = obs.likelihood(o, State::Intrusion);
    const double num1 = mass.m1 * f1;
    const double norm = mass.m0 * f0 + num1;
    if (norm <= 0.0) {
        switch (fallback) {
            case BeliefFallback::Error:
                throw DegenerateUpdateError(
                    "belief update: observation has zero probability under the model");
            case BeliefFallback::CarryForward:
                return {prior_b1, true};
            case BeliefFallback::LikelihoodOnly: {
                if (f0 + f1 <= 0.0) {
                    throw DegenerateUpdateError(
                        "belief update: observation impossible in every live state");
                }
                return {f1 / (f0 + f1), true};
            }
        }
    }
    return {num1 / norm, false};
}

BeliefUpdateResult belief_update_with_fallback(double b1, Action a_d, int o,
                                               const AttackerPolicy& attacker_model, int l,
                                               const ObservationModel& obs,
                                               const GameConfig& cfg, BeliefFallback fallback) {
    const LiveMass mass = predicted_live_mass(b1, a_d, attacker_model, l, cfg);
    return posterior_from_mass(mass, b1, o, obs, fallback);
}

double belief_update(double b1, Action a_d, int o, const AttackerPolicy& attacker_model,
                     int l, const ObservationModel& obs, const GameConfig& cfg) {
    return belief_update_with_fallback(b1, a_d, o, attacker_model, l, obs, cfg,
                                       BeliefFallback::Error)
        .b1;
}

}  // namespace stopgame
