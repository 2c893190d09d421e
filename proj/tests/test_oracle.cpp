#include "doctest.h"

#include <cmath>
#include <memory>

#include "stopgame/oracle.hpp"
#include "test_util.hpp"

using namespace stopgame;
using test::ConstAttacker;
using test::ConstDefender;

TEST_CASE("defender best response against a passive attacker") {
    const GameConfig cfg = test::desk_config(3);
    const ObservationModel obs = test::desk_model();
    const ConstAttacker never(0.0, 0.0);
    const BestResponseResult res = defender_br_vi(cfg, obs, never, BeliefGrid(51));
    CHECK(res.values.converged);
    CHECK(res.values.residual < 1e-6);
    for (int l = 1; l <= cfg.L; ++l) {
        // Stopping costs R_cost/l with no offsetting gain, so the value at
        // b=0 is zero and the greedy action is Continue.
        CHECK(res.values.value(l, 0) == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(res.strategy.value(l, 0) == 0.0);
    }
}

TEST_CASE("defender best response two-line fixed point") {
    GameConfig cfg = GameConfig::defaults(1);
    cfg.gamma = 0.5;
    const ObservationModel obs(DiscretePmf{{1.0}}, DiscretePmf{{1.0}});
    const ConstAttacker passive(0.0, 0.0);
    const BestResponseResult res = defender_br_vi(cfg, obs, passive, BeliefGrid(11));
    // At b=1: Stop pays R_st/1 = 20 and ends the game; Continue solves
    // V = -1 + 0.25 V.
    CHECK(res.values.value(1, 10) == doctest::Approx(20.0).epsilon(1e-6));
    CHECK(res.strategy.value(1, 10) == 1.0);
}

TEST_CASE("attacker best response against a sleeping defender") {
    const GameConfig cfg = GameConfig::defaults(7);
    const ObservationModel obs = test::desk_model();
    const ConstDefender never(0.0);
    const ConstAttacker model(0.1, 0.1);
    const BestResponseResult res = attacker_br_vi(cfg, obs, never, model, BeliefGrid(21));
    CHECK(res.values.converged);
    const double expected = 1.0 / (1.0 - 0.99 * (13.0 / 14.0));
    for (int k = 0; k < 21; k += 5) {
        CHECK(res.values.value(State::Intrusion, 7, k) == doctest::Approx(expected).epsilon(1e-5));
        CHECK(res.strategy.value(State::Intrusion, 7, k) == 0.0);  // keep going
    }
}

TEST_CASE("attacker aborts against an always-stopping defender") {
    const GameConfig cfg = GameConfig::defaults(3);
    const ObservationModel obs = test::desk_model();
    const ConstDefender always(1.0);
    const ConstAttacker model(0.2, 0.2);
    const BestResponseResult res = attacker_br_vi(cfg, obs, always, model, BeliefGrid(21));
    for (int l = 1; l <= 3; ++l) {
        for (int k = 0; k < 21; ++k) {
            CHECK(res.values.value(State::Intrusion, l, k) == doctest::Approx(0.0).epsilon(1e-9));
            CHECK(res.strategy.value(State::Intrusion, l, k) == 1.0);
        }
    }
}

TEST_CASE("attacker values are non-negative") {
    const GameConfig cfg = test::desk_config(3);
    const ObservationModel obs = test::desk_model();
    Rng rng(19);
    for (int trial = 0; trial < 5; ++trial) {
        const auto def = std::make_shared<MixedDefenderPolicy>(test::random_mixture(Player::Defender, 3, 2, rng));
        const MixedAttackerPolicy model(test::random_mixture(Player::Attacker, 3, 2, rng), def);
        const BestResponseResult res = attacker_br_vi(cfg, obs, *def, model, BeliefGrid(31));
        for (double v : res.values.values) CHECK(v >= -1e-6);
    }
}

TEST_CASE("greedy attacker never stops in both states at once") {
    const GameConfig cfg = test::desk_config(3);
    const ObservationModel obs = test::desk_model();
    Rng rng(29);
    for (int trial = 0; trial < 5; ++trial) {
        const auto def = std::make_shared<MixedDefenderPolicy>(test::random_mixture(Player::Defender, 3, 2, rng));
        const MixedAttackerPolicy model(test::random_mixture(Player::Attacker, 3, 2, rng), def);
        const BestResponseResult res = attacker_br_vi(cfg, obs, *def, model, BeliefGrid(31));
        for (int l = 1; l <= 3; ++l) {
            for (int k = 0; k < 31; ++k) {
                if (res.strategy.value(State::Intrusion, l, k) == 1.0) {
                    CHECK(res.strategy.value(State::NoIntrusion, l, k) == 0.0);
                }
            }
        }
    }
}

TEST_CASE("exploitability of a lopsided pair is large") {
    const GameConfig cfg = GameConfig::defaults(7);
    const ObservationModel obs = test::desk_model();
    const ConstDefender never_stop(0.0);
    const ConstAttacker never_attack(0.0, 0.0);
    const ExploitabilityReport report =
        exploitability(cfg, obs, never_stop, never_attack, BeliefGrid(51), 1500, 7);
    CHECK(report.value > 5.0);
    CHECK(report.defender_gain >= -3.0 * report.std_error);
    CHECK(report.attacker_gain > 5.0);
}

TEST_CASE("exploitability is non-negative up to noise for random mixtures") {
    const GameConfig cfg = test::desk_config(2);
    const ObservationModel obs = test::desk_model(8);
    Rng rng(39);
    for (int trial = 0; trial < 3; ++trial) {
        const auto def = std::make_shared<MixedDefenderPolicy>(test::random_mixture(Player::Defender, 2, 3, rng));
        const MixedAttackerPolicy atk(test::random_mixture(Player::Attacker, 2, 3, rng), def);
        const ExploitabilityReport report =
            exploitability(cfg, obs, *def, atk, BeliefGrid(41), 1200, derive_seed(5, trial));
        CHECK(report.value >= -3.0 * report.std_error);
    }
}

TEST_CASE("solve_2xn_zero_sum") {
    // One strictly dominant row: value is that row's minimum, pure solution.
    const MatrixGameSolution dominant =
        solve_2xn_zero_sum({1.0, 2.0, 0.5, 3.0}, {2.0, 3.0, 1.5, 4.0});
    CHECK(dominant.value == doctest::Approx(1.5));
    CHECK(dominant.p_row1 == doctest::Approx(1.0));

    // Matching pennies: mixed 50/50 with value 0.
    const MatrixGameSolution pennies = solve_2xn_zero_sum({1.0, -1.0}, {-1.0, 1.0});
    CHECK(pennies.value == doctest::Approx(0.0));
    CHECK(pennies.p_row1 == doctest::Approx(0.5));

    // Column player ignores dominated columns.
    const MatrixGameSolution three = solve_2xn_zero_sum({3.0, 0.0, 9.0}, {0.0, 2.0, 9.0});
    // Mixing rows against columns 0 and 1: p solves 3(1-p) = 2p -> p = 0.6.
    CHECK(three.p_row1 == doctest::Approx(0.6));
    CHECK(three.value == doctest::Approx(1.2));

    CHECK_THROWS_AS(solve_2xn_zero_sum({}, {}), std::invalid_argument);
}

TEST_CASE("extract_thresholds on hand tables") {
    const BeliefGrid grid(11);
    GridStrategy gs = GridStrategy::zeros(Player::Defender, 1, grid);
    // 0,0,0,1,1,1,1,1,1,1,1 -> boundary at 3.
    for (int k = 3; k < 11; ++k) gs.at(1, k) = 1.0;
    const ThresholdExtraction clean = extract_thresholds(gs, 0);
    CHECK(clean.ok);
    CHECK(clean.thresholds[0] == 3);
    CHECK(clean.flagged_cells[0] == 0);

    // One stray stop below the boundary is tolerated with tolerance 1.
    gs.at(1, 1) = 1.0;
    const ThresholdExtraction tolerant = extract_thresholds(gs, 1);
    CHECK(tolerant.ok);
    CHECK(tolerant.thresholds[0] == 3);
    CHECK(tolerant.flagged_cells[0] == 1);
    const ThresholdExtraction strict = extract_thresholds(gs, 0);
    CHECK_FALSE(strict.ok);
    CHECK(strict.violations[0] == std::vector<int>{1});

    // Attacker rows: upper interval in state 1, lower interval in state 0.
    GridStrategy atk = GridStrategy::zeros(Player::Attacker, 1, grid);
    for (int k = 0; k < 4; ++k) atk.at(State::NoIntrusion, 1, k) = 1.0;
    for (int k = 7; k < 11; ++k) atk.at(State::Intrusion, 1, k) = 1.0;
    const ThresholdExtraction attacker = extract_thresholds(atk, 0);
    CHECK(attacker.ok);
    CHECK(attacker.thresholds[0] == 4);  // continue region of state 0 starts at 4
    CHECK(attacker.thresholds[1] == 7);

    // Non-deterministic entries violate the precondition.
    GridStrategy soft = GridStrategy::zeros(Player::Defender, 1, grid);
    soft.at(1, 5) = 0.5;
    CHECK_THROWS_AS(extract_thresholds(soft, 0), std::invalid_argument);
}

TEST_CASE("game value iteration on a tiny instance") {
    GameConfig cfg = GameConfig::defaults(2);
    cfg.gamma = 0.9;
    const ObservationModel obs = test::desk_model(6);
    const GridValues values = game_value_vi(cfg, obs, BeliefGrid(41));
    CHECK(values.converged);
    for (int l = 1; l <= 2; ++l) {
        // The attacker can always refuse to play: values never exceed zero.
        for (int k = 0; k < 41; ++k) CHECK(values.value(l, k) <= 1e-9);
        // At certainty the attacker aborts and the value vanishes.
        CHECK(std::abs(values.value(l, 40)) <= 1e-6);
        CHECK(std::abs(values.value(l, 0)) <= 1e-6);
    }
    // Somewhere in the interior the attacker extracts value.
    double min_value = 0.0;
    for (int k = 0; k < 41; ++k) min_value = std::min(min_value, values.value(1, k));
    CHECK(min_value < -1e-3);
}

TEST_CASE("defender value iteration residual is below tolerance") {
    const GameConfig cfg = test::desk_config(2);
    const ObservationModel obs = test::desk_model(8);
    OracleOptions options;
    options.tol = 1e-6;
    const ConstAttacker attacker(0.3, 0.1);
    const BestResponseResult res = defender_br_vi(cfg, obs, attacker, BeliefGrid(31), options);
    CHECK(res.values.converged);
    CHECK(res.values.residual < options.tol);
    // Iteration count is within the contraction bound for gamma = 0.99.
    const double bound = std::log(options.tol * (1.0 - cfg.gamma) / cfg.max_abs_reward()) /
                         std::log(cfg.gamma);
    CHECK(res.values.sweeps <= static_cast<int>(bound) * cfg.L + 2 * cfg.L);
}
