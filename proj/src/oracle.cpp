#include "stopgame/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stopgame {

namespace {

constexpr State kLive[2] = {State::NoIntrusion, State::Intrusion};

struct NextBelief {
    int lo = 0;
    double w_lo = 1.0;
    double z = 0.0;  // P[o and live]; zero entries carry no continuation weight
};

// Belief kinematics per (grid point, observation). The transition kernel
// treats a defender stop at l > 1 exactly like a continue for the live
// states, so one table serves both defender actions; at (l=1, Stop) the game
// ends and no update happens. Pinned by a unit test on belief_update.
std::vector<NextBelief> belief_kinematics(const GameConfig& cfg, const ObservationModel& obs,
                                          const AttackerPolicy& model, const BeliefGrid& grid,
                                          int l, BeliefFallback fallback) {
    const int A = obs.alphabet_size();
    std::vector<NextBelief> table(static_cast<std::size_t>(grid.K) * A);
    for (int k = 0; k < grid.K; ++k) {
        const double b = grid.point(k);
        const LiveMass mass = predicted_live_mass(b, Action::Continue, model, l, cfg);
        for (int o = 0; o < A; ++o) {
            NextBelief& cell = table[static_cast<std::size_t>(k) * A + o];
            const double f0 = obs.likelihood(o, State::NoIntrusion);
            const double f1 = obs.likelihood(o, State::Intrusion);
            cell.z = mass.m0 * f0 + mass.m1 * f1;
            if (f0 + f1 <= 0.0) continue;  // symbol never emitted; weightless
            const BeliefUpdateResult next = posterior_from_mass(mass, b, o, obs, fallback);
            const BeliefGrid::Interp w = grid.locate(next.b1);
            cell.lo = w.lo;
            cell.w_lo = w.w_lo;
        }
    }
    return table;
}

double interp(const std::vector<double>& v, std::size_t base, const NextBelief& cell) {
    return cell.w_lo * v[base + static_cast<std::size_t>(cell.lo)] +
           (1.0 - cell.w_lo) * v[base + static_cast<std::size_t>(cell.lo) + 1];
}

}  // namespace

double GridValues::value(int l, int k) const {
    return values[static_cast<std::size_t>(l - 1) * grid.K + k];
}

double GridValues::value(State s, int l, int k) const {
    return values[(static_cast<std::size_t>(static_cast<int>(s)) * L + (l - 1)) * grid.K + k];
}

double& GridValues::at(int l, int k) {
    return values[static_cast<std::size_t>(l - 1) * grid.K + k];
}

double& GridValues::at(State s, int l, int k) {
    return values[(static_cast<std::size_t>(static_cast<int>(s)) * L + (l - 1)) * grid.K + k];
}

BestResponseResult defender_br_vi(const GameConfig& cfg, const ObservationModel& obs,
                                  const AttackerPolicy& attacker, BeliefGrid grid,
                                  const OracleOptions& options) {
    cfg.validate();
    const int K = grid.K;
    const int A = obs.alphabet_size();

    BestResponseResult result;
    result.strategy = GridStrategy::zeros(Player::Defender, cfg.L, grid);
    result.values.grid = grid;
    result.values.L = cfg.L;
    result.values.per_state = false;
    result.values.values.assign(static_cast<std::size_t>(cfg.L) * K, 0.0);
    result.values.residual = 0.0;
    result.values.converged = true;

    // Stops-remaining layers couple one way (a stop moves to l-1), so each
    // layer is solved to a fixed point in turn.
    for (int l = 1; l <= cfg.L; ++l) {
        const std::vector<NextBelief> kin =
            belief_kinematics(cfg, obs, attacker, grid, l, options.fallback);

        // Expected immediate reward per grid point and defender action.
        std::vector<std::array<double, 2>> er(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
            const double b = grid.point(k);
            const double prior[2] = {1.0 - b, b};
            std::array<double, 2> acc = {0.0, 0.0};
            for (int si = 0; si < 2; ++si) {
                if (prior[si] == 0.0) continue;
                const double p_stop = attacker.stop_prob(l, b, kLive[si]);
                const double p_act[2] = {1.0 - p_stop, p_stop};
                for (int ai = 0; ai < 2; ++ai) {
                    if (p_act[ai] == 0.0) continue;
                    const ActionPair cont_pair{Action::Continue,
                                               ai == 1 ? Action::Stop : Action::Continue};
                    const ActionPair stop_pair{Action::Stop,
                                               ai == 1 ? Action::Stop : Action::Continue};
                    acc[0] += prior[si] * p_act[ai] * reward(kLive[si], cont_pair, l, cfg);
                    acc[1] += prior[si] * p_act[ai] * reward(kLive[si], stop_pair, l, cfg);
                }
            }
            er[static_cast<std::size_t>(k)] = acc;
        }

        // The stop branch lands in the already-converged layer l-1, so its
        // action value is constant across sweeps.
        const std::size_t layer = static_cast<std::size_t>(l - 1) * K;
        std::vector<double> q_stop(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
            double q = er[static_cast<std::size_t>(k)][1];
            if (l > 1) {
                const std::size_t below = static_cast<std::size_t>(l - 2) * K;
                double cont = 0.0;
                for (int o = 0; o < A; ++o) {
                    const NextBelief& cell = kin[static_cast<std::size_t>(k) * A + o];
                    if (cell.z > 0.0) cont += cell.z * interp(result.values.values, below, cell);
                }
                q += cfg.gamma * cont;
            }
            q_stop[static_cast<std::size_t>(k)] = q;
        }

        std::vector<double> current(static_cast<std::size_t>(K), 0.0);
        std::vector<double> next(static_cast<std::size_t>(K), 0.0);
        double residual = std::numeric_limits<double>::infinity();
        int sweep = 0;
        while (residual >= options.tol && sweep < options.max_sweeps) {
            ++sweep;
            for (int k = 0; k < K; ++k) {
                double cont = 0.0;
                for (int o = 0; o < A; ++o) {
                    const NextBelief& cell = kin[static_cast<std::size_t>(k) * A + o];
                    if (cell.z > 0.0) cont += cell.z * interp(current, 0, cell);
                }
                const double q_cont = er[static_cast<std::size_t>(k)][0] + cfg.gamma * cont;
                next[static_cast<std::size_t>(k)] = std::max(q_cont, q_stop[static_cast<std::size_t>(k)]);
            }
            residual = 0.0;
            for (int k = 0; k < K; ++k) {
                residual = std::max(residual,
                                    std::abs(next[static_cast<std::size_t>(k)] -
                                             current[static_cast<std::size_t>(k)]));
            }
            current.swap(next);
        }
        result.values.sweeps += sweep;
        result.values.residual = std::max(result.values.residual, residual);
        if (residual >= options.tol) result.values.converged = false;

        for (int k = 0; k < K; ++k) {
            result.values.values[layer + static_cast<std::size_t>(k)] =
                current[static_cast<std::size_t>(k)];
        }
        // Greedy action from the converged values.
        for (int k = 0; k < K; ++k) {
            double cont = 0.0;
            for (int o = 0; o < A; ++o) {
                const NextBelief& cell = kin[static_cast<std::size_t>(k) * A + o];
                if (cell.z > 0.0) cont += cell.z * interp(result.values.values, layer, cell);
            }
            const double q_cont = er[static_cast<std::size_t>(k)][0] + cfg.gamma * cont;
            result.strategy.at(l, k) = q_stop[static_cast<std::size_t>(k)] > q_cont ? 1.0 : 0.0;
        }
    }
    return result;
}

BestResponseResult attacker_br_vi(const GameConfig& cfg, const ObservationModel& obs,
                                  const DefenderPolicy& defender,
                                  const AttackerPolicy& defender_belief_model, BeliefGrid grid,
                                  const OracleOptions& options) {
    cfg.validate();
    const int K = grid.K;
    const int A = obs.alphabet_size();

    BestResponseResult result;
    result.strategy = GridStrategy::zeros(Player::Attacker, cfg.L, grid);
    result.values.grid = grid;
    result.values.L = cfg.L;
    result.values.per_state = true;
    result.values.values.assign(2 * static_cast<std::size_t>(cfg.L) * K, 0.0);
    result.values.residual = 0.0;
    result.values.converged = true;

    for (int l = 1; l <= cfg.L; ++l) {
        const std::vector<NextBelief> kin =
            belief_kinematics(cfg, obs, defender_belief_model, grid, l, options.fallback);
        std::vector<double> d(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) d[static_cast<std::size_t>(k)] = defender.stop_prob(l, grid.point(k));

        // Values of the layer below, folded over observations per arrival
        // state: below[s'][k] = sum_o f(o|s') V(s', l-1, b'(k, o)).
        std::array<std::vector<double>, 2> below;
        for (int sp = 0; sp < 2; ++sp) {
            below[static_cast<std::size_t>(sp)].assign(static_cast<std::size_t>(K), 0.0);
            if (l == 1) continue;
            const std::size_t base =
                (static_cast<std::size_t>(sp) * cfg.L + (l - 2)) * static_cast<std::size_t>(K);
            for (int k = 0; k < K; ++k) {
                double acc = 0.0;
                for (int o = 0; o < A; ++o) {
                    const NextBelief& cell = kin[static_cast<std::size_t>(k) * A + o];
                    const double f = obs.likelihood(o, kLive[sp]);
                    if (f > 0.0) acc += f * interp(result.values.values, base, cell);
                }
                below[static_cast<std::size_t>(sp)][static_cast<std::size_t>(k)] = acc;
            }
        }

        // current[s][k] for this layer; same[s'][k] folds the current layer
        // over observations and is refreshed every sweep.
        std::array<std::vector<double>, 2> current;
        std::array<std::vector<double>, 2> next_vals;
        std::array<std::vector<double>, 2> same;
        for (int sp = 0; sp < 2; ++sp) {
            current[static_cast<std::size_t>(sp)].assign(static_cast<std::size_t>(K), 0.0);
            next_vals[static_cast<std::size_t>(sp)].assign(static_cast<std::size_t>(K), 0.0);
            same[static_cast<std::size_t>(sp)].assign(static_cast<std::size_t>(K), 0.0);
        }

        auto q_value = [&](int si, int k, int ai) {
            const State s = kLive[si];
            const Action a_a = ai == 1 ? Action::Stop : Action::Continue;
            const double pd = d[static_cast<std::size_t>(k)];
            double q = 0.0;
            for (int di = 0; di < 2; ++di) {
                const double p = di == 1 ? pd : 1.0 - pd;
                if (p == 0.0) continue;
                const Action a_d = di == 1 ? Action::Stop : Action::Continue;
                const ActionPair pair{a_d, a_a};
                double term = -reward(s, pair, l, cfg);
                const int l_next = l - di;
                if (l_next >= 1) {
                    double cont = 0.0;
                    for (int sp = 0; sp < 2; ++sp) {
                        const double tp = transition_prob(s, kLive[sp], pair, l, cfg);
                        if (tp == 0.0) continue;
                        const auto& fold = (l_next == l) ? same : below;
                        cont += tp * fold[static_cast<std::size_t>(sp)][static_cast<std::size_t>(k)];
                    }
                    term += cfg.gamma * cont;
                }
                q += p * term;
            }
            return q;
        };

        double residual = std::numeric_limits<double>::infinity();
        int sweep = 0;
        while (residual >= options.tol && sweep < options.max_sweeps) {
            ++sweep;
            for (int sp = 0; sp < 2; ++sp) {
                for (int k = 0; k < K; ++k) {
                    double acc = 0.0;
                    for (int o = 0; o < A; ++o) {
                        const NextBelief& cell = kin[static_cast<std::size_t>(k) * A + o];
                        const double f = obs.likelihood(o, kLive[sp]);
                        if (f > 0.0) {
                            acc += f * (cell.w_lo *
                                            current[static_cast<std::size_t>(sp)]
                                                   [static_cast<std::size_t>(cell.lo)] +
                                        (1.0 - cell.w_lo) *
                                            current[static_cast<std::size_t>(sp)]
                                                   [static_cast<std::size_t>(cell.lo) + 1]);
                        }
                    }
                    same[static_cast<std::size_t>(sp)][static_cast<std::size_t>(k)] = acc;
                }
            }
            residual = 0.0;
            for (int si = 0; si < 2; ++si) {
                for (int k = 0; k < K; ++k) {
                    const double v = std::max(q_value(si, k, 0), q_value(si, k, 1));
                    residual = std::max(residual,
                                        std::abs(v - current[static_cast<std::size_t>(si)]
                                                            [static_cast<std::size_t>(k)]));
                    next_vals[static_cast<std::size_t>(si)][static_cast<std::size_t>(k)] = v;
                }
            }
            for (int si = 0; si < 2; ++si) {
                current[static_cast<std::size_t>(si)].swap(next_vals[static_cast<std::size_t>(si)]);
            }
        }
        result.values.sweeps += sweep;
        result.values.residual = std::max(result.values.residual, residual);
        if (residual >= options.tol) result.values.converged = false;

        for (int si = 0; si < 2; ++si) {
            const std::size_t base =
                (static_cast<std::size_t>(si) * cfg.L + (l - 1)) * static_cast<std::size_t>(K);
            for (int k = 0; k < K; ++k) {
                result.values.values[base + static_cast<std::size_t>(k)] =
                    current[static_cast<std::size_t>(si)][static_cast<std::size_t>(k)];
            }
        }
        // Refresh the same-layer fold against the converged values before the
        // greedy pass.
        for (int sp = 0; sp < 2; ++sp) {
            for (int k = 0; k < K; ++k) {
                double acc = 0.0;
                for (int o = 0; o < A; ++o) {
                    const NextBelief& cell = kin[static_cast<std::size_t>(k) * A + o];
                    const double f = obs.likelihood(o, kLive[sp]);
                    if (f > 0.0) {
                        acc += f * (cell.w_lo * current[static_cast<std::size_t>(sp)]
                                                       [static_cast<std::size_t>(cell.lo)] +
                                    (1.0 - cell.w_lo) * current[static_cast<std::size_t>(sp)]
                                                               [static_cast<std::size_t>(cell.lo) + 1]);
                    }
                }
                same[static_cast<std::size_t>(sp)][static_cast<std::size_t>(k)] = acc;
            }
        }
        for (int si = 0; si < 2; ++si) {
            for (int k = 0; k < K; ++k) {
                result.strategy.at(kLive[si], l, k) =
                    q_value(si, k, 1) > q_value(si, k, 0) ? 1.0 : 0.0;
            }
        }
    }
    return result;
}

ExploitabilityReport exploitability(const GameConfig& cfg, const ObservationModel& obs,
                                    const DefenderPolicy& defender, const AttackerPolicy& attacker,
                                    BeliefGrid grid, int eval_episodes, std::uint64_t seed,
                                    const OracleOptions& options, int threads) {
    const BestResponseResult br_d = defender_br_vi(cfg, obs, attacker, grid, options);
    const BestResponseResult br_a = attacker_br_vi(cfg, obs, defender, attacker, grid, options);

    const GridDefenderPolicy br_defender(br_d.strategy);
    const GridAttackerPolicy br_attacker(br_a.strategy);

    SimOptions sim;
    sim.fallback = options.fallback;
    sim.threads = threads;

    // Both terms keep the belief driven by the announced attacker strategy.
    const BeliefDefenderAgent br_defender_agent(br_defender);
    const ObjectiveEstimate term_d = estimate_objective(cfg, obs, br_defender_agent, attacker,
                                                        attacker, eval_episodes,
                                                        derive_seed(seed, 1), sim);
    const BeliefDefenderAgent defender_agent(defender);
    const ObjectiveEstimate term_a = estimate_objective(cfg, obs, defender_agent, br_attacker,
                                                        attacker, eval_episodes,
                                                        derive_seed(seed, 2), sim);
    ExploitabilityReport report;
    report.defender_gain = term_d.mean;
    report.attacker_gain = -term_a.mean;
    report.value = report.defender_gain + report.attacker_gain;
    report.std_error = std::sqrt(term_d.std_error * term_d.std_error +
                                 term_a.std_error * term_a.std_error);
    return report;
}

MatrixGameSolution solve_2xn_zero_sum(const std::vector<double>& row0,
                                      const std::vector<double>& row1) {
    if (row0.empty() || row0.size() != row1.size()) {
        throw std::invalid_argument("solve_2xn_zero_sum: rows must be non-empty and equal length");
    }
    const std::size_t n = row0.size();
    auto min_payoff = [&](double p) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            m = std::min(m, (1.0 - p) * row0[j] + p * row1[j]);
        }
        return m;
    };
    std::vector<double> candidates = {0.0, 1.0};
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            const double dj = row1[j] - row0[j];
            const double dk = row1[k] - row0[k];
            const double denom = dj - dk;
            if (std::abs(denom) < 1e-14) continue;
            const double p = (row0[k] - row0[j]) / denom;
            if (p > 0.0 && p < 1.0) candidates.push_back(p);
        }
    }
    MatrixGameSolution best{-std::numeric_limits<double>::infinity(), 0.0};
    for (double p : candidates) {
        const double v = min_payoff(p);
        if (v > best.value) best = {v, p};
    }
    return best;
}

GridValues game_value_vi(const GameConfig& cfg, const ObservationModel& obs, BeliefGrid grid,
                         const OracleOptions& options) {
    cfg.validate();
    const int K = grid.K;
    const int A = obs.alphabet_size();

    GridValues values;
    values.grid = grid;
    values.L = cfg.L;
    values.per_state = false;
    values.values.assign(static_cast<std::size_t>(cfg.L) * K, 0.0);
    values.converged = true;

    // A pure state-conditioned attacker decision rule, used as the belief
    // model for the matching stage-game column.
    class RulePolicy final : public AttackerPolicy {
    public:
        RulePolicy(Action in0, Action in1) : in0_(in0), in1_(in1) {}
        double stop_prob(int, double, State s) const override {
            return (s == State::Intrusion ? in1_ : in0_) == Action::Stop ? 1.0 : 0.0;
        }

    private:
        Action in0_;
        Action in1_;
    };
    const std::array<RulePolicy, 4> rules = {RulePolicy(Action::Continue, Action::Continue),
                                             RulePolicy(Action::Continue, Action::Stop),
                                             RulePolicy(Action::Stop, Action::Continue),
                                             RulePolicy(Action::Stop, Action::Stop)};
    const Action rule_actions[4][2] = {{Action::Continue, Action::Continue},
                                       {Action::Continue, Action::Stop},
                                       {Action::Stop, Action::Continue},
                                       {Action::Stop, Action::Stop}};

    for (int l = 1; l <= cfg.L; ++l) {
        std::array<std::vector<NextBelief>, 4> kin;
        for (int r = 0; r < 4; ++r) {
            kin[static_cast<std::size_t>(r)] =
                belief_kinematics(cfg, obs, rules[static_cast<std::size_t>(r)], grid, l,
                                  options.fallback);
        }
        const std::size_t layer = static_cast<std::size_t>(l - 1) * K;
        const std::size_t below = l > 1 ? static_cast<std::size_t>(l - 2) * K : 0;

        std::vector<double> current(static_cast<std::size_t>(K), 0.0);
        std::vector<double> next(static_cast<std::size_t>(K), 0.0);

        // Stage payoff for defender action a_d against rule r at grid point
        // k; level_vals carries the in-progress iterate for the own layer,
        // the converged table serves the layer below.
        auto payoff = [&](int k, int di, int r, const std::vector<double>& level_vals) {
            const Action a_d = di == 1 ? Action::Stop : Action::Continue;
            const int l_next = l - di;
            const double b = grid.point(k);
            const double prior[2] = {1.0 - b, b};
            double acc = 0.0;
            for (int si = 0; si < 2; ++si) {
                if (prior[si] == 0.0) continue;
                const ActionPair pair{a_d, rule_actions[r][si]};
                acc += prior[si] * reward(kLive[si], pair, l, cfg);
                if (l_next < 1) continue;
                for (int sp = 0; sp < 2; ++sp) {
                    const double tp = transition_prob(kLive[si], kLive[sp], pair, l, cfg);
                    if (tp == 0.0) continue;
                    double fold = 0.0;
                    for (int o = 0; o < A; ++o) {
                        const NextBelief& cell =
                            kin[static_cast<std::size_t>(r)][static_cast<std::size_t>(k) * A + o];
                        const double f = obs.likelihood(o, kLive[sp]);
                        if (f <= 0.0) continue;
                        if (l_next == l) {
                            fold += f * (cell.w_lo * level_vals[static_cast<std::size_t>(cell.lo)] +
                                         (1.0 - cell.w_lo) *
                                             level_vals[static_cast<std::size_t>(cell.lo) + 1]);
                        } else {
                            fold += f * interp(values.values, below, cell);
                        }
                    }
                    acc += prior[si] * cfg.gamma * tp * fold;
                }
            }
            return acc;
        };

        double residual = std::numeric_limits<double>::infinity();
        int sweep = 0;
        while (residual >= options.tol && sweep < options.max_sweeps) {
            ++sweep;
            for (int k = 0; k < K; ++k) {
                std::vector<double> row0(4), row1(4);
                for (int r = 0; r < 4; ++r) {
                    row0[static_cast<std::size_t>(r)] = payoff(k, 0, r, current);
                    row1[static_cast<std::size_t>(r)] = payoff(k, 1, r, current);
                }
                next[static_cast<std::size_t>(k)] = solve_2xn_zero_sum(row0, row1).value;
            }
            residual = 0.0;
            for (int k = 0; k < K; ++k) {
                residual = std::max(residual, std::abs(next[static_cast<std::size_t>(k)] -
                                                       current[static_cast<std::size_t>(k)]));
            }
            current.swap(next);
        }
        values.sweeps += sweep;
        values.residual = std::max(values.residual, residual);
        if (residual >= options.tol) values.converged = false;
        for (int k = 0; k < K; ++k) {
            values.values[layer + static_cast<std::size_t>(k)] = current[static_cast<std::size_t>(k)];
        }
    }
    return values;
}

ThresholdExtraction extract_thresholds(const GridStrategy& gs, int tolerance_cells) {
    gs.validate();
    const int K = gs.grid.K;
    const int rows = (gs.player == Player::Defender ? 1 : 2) * gs.L;

    ThresholdExtraction extraction;
    extraction.thresholds.assign(static_cast<std::size_t>(rows), 0);
    extraction.flagged_cells.assign(static_cast<std::size_t>(rows), 0);
    extraction.violations.assign(static_cast<std::size_t>(rows), {});

    for (int row = 0; row < rows; ++row) {
        // Row layout matches the table: defender rows by l; attacker rows
        // s-major, s=0 first.
        const bool attacker_state0 = gs.player == Player::Attacker && row < gs.L;
        std::vector<int> cells(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
            double v;
            if (gs.player == Player::Defender) {
                v = gs.value(row + 1, k);
            } else {
                const int s = row / gs.L;
                const int l = row % gs.L + 1;
                v = gs.value(s == 0 ? State::NoIntrusion : State::Intrusion, l, k);
            }
            if (v <= 0.01) {
                cells[static_cast<std::size_t>(k)] = 0;
            } else if (v >= 0.99) {
                cells[static_cast<std::size_t>(k)] = 1;
            } else {
                throw std::invalid_argument(
                    "extract_thresholds: table entries must be within 0.01 of 0 or 1");
            }
            // Stop regions are lower intervals for the attacker in state 0;
            // flipping reduces them to the upper-interval check.
            if (attacker_state0) cells[static_cast<std::size_t>(k)] ^= 1;
        }
        // Best upper-interval boundary: minimize mismatches against the
        // pattern 0...0 1...1 with ones from index t; ties take the largest t.
        std::vector<int> ones_before(static_cast<std::size_t>(K + 1), 0);
        for (int k = 0; k < K; ++k) {
            ones_before[static_cast<std::size_t>(k + 1)] =
                ones_before[static_cast<std::size_t>(k)] + cells[static_cast<std::size_t>(k)];
        }
        const int total_ones = ones_before[static_cast<std::size_t>(K)];
        int best_t = 0;
        int best_mismatches = std::numeric_limits<int>::max();
        for (int t = 0; t <= K; ++t) {
            const int ones_low = ones_before[static_cast<std::size_t>(t)];
            const int zeros_high = (K - t) - (total_ones - ones_low);
            const int mism = ones_low + zeros_high;
            if (mism <= best_mismatches) {
                best_mismatches = mism;
                best_t = t;
            }
        }
        extraction.thresholds[static_cast<std::size_t>(row)] = best_t;
        extraction.flagged_cells[static_cast<std::size_t>(row)] = best_mismatches;
        if (best_mismatches > tolerance_cells) {
            extraction.ok = false;
            for (int k = 0; k < K; ++k) {
                const int expected = k >= best_t ? 1 : 0;
                if (cells[static_cast<std::size_t>(k)] != expected) {
                    extraction.violations[static_cast<std::size_t>(row)].push_back(k);
                }
            }
        }
    }
    return extraction;
}

}  // namespace stopgame
