#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stopgame/game.hpp"
#include "stopgame/simulator.hpp"
#include "stopgame/strategy.hpp"

namespace stopgame {

// Tabulated values over the belief grid: per (l, k) for the defender
// problem, per (s, l, k) for the attacker problem. Attacker values are in
// the attacker's sign convention (maximizing the negated defender reward).
struct GridValues {
    BeliefGrid grid{201};
    int L = 1;
    bool per_state = false;
    std::vector<double> values;
    double residual = 0.0;  // final sup-norm successive difference
    bool converged = true;
    int sweeps = 0;

    double value(int l, int k) const;
    double value(State s, int l, int k) const;
    double& at(int l, int k);
    double& at(State s, int l, int k);
};

struct OracleOptions {
    double tol = 1e-6;
    int max_sweeps = 10000;
    BeliefFallback fallback = BeliefFallback::LikelihoodOnly;
};

struct BestResponseResult {
    GridStrategy strategy;  // greedy, entries in {0,1}
    GridValues values;
};

// Value iteration on the defender's belief MDP against a fixed attacker
// strategy, which also drives the belief updates. Returns the greedy
// strategy and the converged values.
BestResponseResult defender_br_vi(const GameConfig& cfg, const ObservationModel& obs,
                                  const AttackerPolicy& attacker, BeliefGrid grid,
                                  const OracleOptions& options = {});

// Value iteration on the attacker's MDP over (s, l, belief). The defender
// acts per its strategy; the belief trajectory is driven by
// defender_belief_model, the attacker strategy the defender assumes.
BestResponseResult attacker_br_vi(const GameConfig& cfg, const ObservationModel& obs,
                                  const DefenderPolicy& defender,
                                  const AttackerPolicy& defender_belief_model, BeliefGrid grid,
                                  const OracleOptions& options = {});

struct ExploitabilityReport {
    double value = 0.0;      // J_D(br_D, pi_A) + J_A(pi_D, br_A)
    double std_error = 0.0;  // pooled over the two Monte Carlo terms
    double defender_gain = 0.0;
    double attacker_gain = 0.0;
};

// Approximate exploitability of a strategy pair. Both terms keep the
// defender's belief update driven by the announced attacker strategy, since
// the defender cannot observe a deviation.
ExploitabilityReport exploitability(const GameConfig& cfg, const ObservationModel& obs,
                                    const DefenderPolicy& defender, const AttackerPolicy& attacker,
                                    BeliefGrid grid, int eval_episodes, std::uint64_t seed,
                                    const OracleOptions& options = {}, int threads = 1);

// Approximate minimax value iteration over (l, belief): each grid point
// hosts a stage game with 2 defender actions against 4 state-conditioned
// attacker decision rules, solved exactly. A simplification of the exact
// one-sided operator, intended for qualitative value-shape checks only.
GridValues game_value_vi(const GameConfig& cfg, const ObservationModel& obs, BeliefGrid grid,
                         const OracleOptions& options = {});

// Exact solution of a 2-row zero-sum matrix game (row player maximizes).
// Vertex enumeration over the row-mixture probability.
struct MatrixGameSolution {
    double value = 0.0;
    double p_row1 = 0.0;  // probability on row index 1
};
MatrixGameSolution solve_2xn_zero_sum(const std::vector<double>& row0,
                                      const std::vector<double>& row1);

struct ThresholdExtraction {
    bool ok = true;
    // One entry per (l) row for defender tables, per (s, l) in s-major order
    // for attacker tables: the first grid index of the stop region.
    std::vector<int> thresholds;
    std::vector<int> flagged_cells;          // total misordered cells per row
    std::vector<std::vector<int>> violations;  // misordered grid indices per row
};

// Verifies the near-deterministic table has interval structure: the stop
// region is an upper interval of the grid for the defender and for the
// attacker in s=1, and a lower interval for the attacker in s=0. Rows may
// contain up to tolerance_cells misordered cells.
ThresholdExtraction extract_thresholds(const GridStrategy& gs, int tolerance_cells);

}  // namespace stopgame
