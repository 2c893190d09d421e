#include "doctest.h"

#include <cmath>
#include <numeric>

#include "stopgame/selfplay.hpp"
#include "test_util.hpp"

using namespace stopgame;

namespace {

SelfPlayConfig tiny_config() {
    SelfPlayConfig h;
    h.inner_iterations = 2;
    h.br_episodes = 4;
    h.eval_episodes = 8;
    h.grid_points = 21;
    h.max_outer = 2;
    h.threads = 1;
    return h;
}

}  // namespace

TEST_CASE("spsa_gains published assignment") {
    SelfPlayConfig h;
    CHECK(spsa_gains(1, h).c_n == doctest::Approx(10.0));
    CHECK(spsa_gains(1, h).a_n == doctest::Approx(1.0 / std::pow(101.0, 0.101)).epsilon(1e-9));
    CHECK(spsa_gains(1, h).a_n == doctest::Approx(0.6274).epsilon(1e-3));

    // Both gains decay monotonically to zero.
    double prev_a = 1e9, prev_c = 1e9;
    for (int n = 1; n <= 20000; n *= 4) {
        const SpsaGains g = spsa_gains(n, h);
        CHECK(g.a_n < prev_a);
        CHECK(g.c_n < prev_c);
        prev_a = g.a_n;
        prev_c = g.c_n;
    }
    CHECK(spsa_gains(1 << 20, h).a_n < 0.3);
    CHECK(spsa_gains(1 << 20, h).c_n < 0.01);

    // The swapped assignment exchanges the exponents.
    SelfPlayConfig swapped = h;
    swapped.swap_gain_exponents = true;
    CHECK(spsa_gains(1, swapped).a_n == doctest::Approx(1.0 / std::pow(101.0, 0.602)));
    CHECK(spsa_gains(1, swapped).c_n == doctest::Approx(10.0));
    CHECK(spsa_gains(4, swapped).c_n == doctest::Approx(10.0 / std::pow(4.0, 0.101)));

    CHECK_THROWS_AS(spsa_gains(0, h), std::invalid_argument);
}

TEST_CASE("spsa_gradient on linear and constant objectives") {
    Rng rng(3);
    // 1-D linear: the two-point rule is exact.
    const double g = -2.5;
    auto linear = [&](const std::vector<double>& theta) { return g * theta[0]; };
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<double> grad = spsa_gradient(linear, {1.0}, 0.7, rng);
        CHECK(grad[0] == doctest::Approx(g).epsilon(1e-12));
    }
    // Constant objective: zero vector.
    auto constant = [](const std::vector<double>&) { return 3.0; };
    const std::vector<double> zero = spsa_gradient(constant, {1.0, -1.0, 0.5}, 0.3, rng);
    for (double v : zero) CHECK(v == 0.0);

    auto bad = [](const std::vector<double>&) { return std::nan(""); };
    CHECK_THROWS_AS(spsa_gradient(bad, {0.0}, 0.5, rng), std::runtime_error);
    CHECK_THROWS_AS(spsa_gradient(constant, {0.0}, 0.0, rng), std::invalid_argument);
}

TEST_CASE("spsa_gradient mean matches the analytic gradient on a quadratic") {
    Rng rng(13);
    const std::vector<double> target = {0.3, -1.1, 0.7};
    auto objective = [&](const std::vector<double>& theta) {
        double acc = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            acc -= (theta[i] - target[i]) * (theta[i] - target[i]);
        }
        return acc;
    };
    const std::vector<double> point = {1.0, 0.5, -0.4};
    std::vector<double> mean(3, 0.0);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const std::vector<double> grad = spsa_gradient(objective, point, 0.5, rng);
        for (int k = 0; k < 3; ++k) mean[k] += grad[k];
    }
    double norm = 0.0, err = 0.0;
    for (int k = 0; k < 3; ++k) {
        mean[k] /= draws;
        const double analytic = -2.0 * (point[k] - target[k]);
        err += (mean[k] - analytic) * (mean[k] - analytic);
        norm += analytic * analytic;
    }
    CHECK(std::sqrt(err) < 0.05 * std::sqrt(norm));
}

TEST_CASE("spsa ascent improves a concave objective for most seeds") {
    // Standard gain assignment; the quadratic test problem.
    SelfPlayConfig h;
    h.swap_gain_exponents = true;
    h.inner_iterations = 300;
    int improved = 0;
    for (int seed = 0; seed < 100; ++seed) {
        Rng rng(derive_seed(100, seed));
        const std::vector<double> target = {rng.uniform() * 2 - 1, rng.uniform() * 2 - 1,
                                            rng.uniform() * 2 - 1};
        auto objective = [&](const std::vector<double>& theta) {
            double acc = 0.0;
            for (std::size_t i = 0; i < theta.size(); ++i) {
                acc -= (theta[i] - target[i]) * (theta[i] - target[i]);
            }
            return acc;
        };
        std::vector<double> theta = {rng.rademacher(), rng.rademacher(), rng.rademacher()};
        const double initial = objective(theta);
        for (int n = 1; n <= h.inner_iterations; ++n) {
            const SpsaGains gains = spsa_gains(n, h);
            const std::vector<double> grad = spsa_gradient(objective, theta, gains.c_n, rng);
            for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += gains.a_n * grad[i];
        }
        if (objective(theta) >= initial) ++improved;
    }
    CHECK(improved >= 90);
}

TEST_CASE("learn_best_response dimensions and N=0 passthrough") {
    const GameConfig cfg = test::desk_config(2);
    const ObservationModel obs = test::desk_model(8);
    Rng rng(7);
    const MixedThresholdStrategy mix_d = test::random_mixture(Player::Defender, 2, 1, rng);
    const MixedThresholdStrategy mix_a = test::random_mixture(Player::Attacker, 2, 1, rng);

    SelfPlayConfig h = tiny_config();
    h.inner_iterations = 0;
    const ThresholdVector d0 = learn_best_response(cfg, obs, Player::Defender, mix_a, mix_d, h, rng);
    CHECK(d0.player == Player::Defender);
    CHECK(d0.theta.size() == 2);
    for (double v : d0.theta) CHECK(std::abs(v) == 1.0);  // untouched random init

    const ThresholdVector a0 = learn_best_response(cfg, obs, Player::Attacker, mix_d, mix_a, h, rng);
    CHECK(a0.player == Player::Attacker);
    CHECK(a0.theta.size() == 4);
    for (double v : a0.theta) CHECK(std::abs(v) == 1.0);
}

TEST_CASE("defender learns not to stop against a passive attacker") {
    const GameConfig cfg = test::desk_config(2);
    const ObservationModel obs = test::desk_model(8);
    const test::ConstAttacker never(0.0, 0.0);
    SelfPlayConfig h;
    h.swap_gain_exponents = true;
    h.inner_iterations = 30;
    h.br_episodes = 20;
    h.threads = 1;
    Rng rng(11);
    const ThresholdVector learned = learn_defender_best_response(cfg, obs, never, h, rng);
    // The belief stays at zero against a never-attacking model, so the
    // learned strategy never stops on the reachable path and earns zero.
    const MixedDefenderPolicy policy(MixedThresholdStrategy::uniform({learned}));
    for (int l = 1; l <= 2; ++l) CHECK(policy.stop_prob(l, 0.0) < 0.1);
    const BeliefDefenderAgent agent(policy);
    GameConfig short_cfg = cfg;
    short_cfg.t_max = 50;
    const ObjectiveEstimate est =
        estimate_objective(short_cfg, obs, agent, never, never, 200, 3);
    CHECK(est.mean >= -0.1);
}

TEST_CASE("attacker learns to attack a sleeping defender") {
    const GameConfig cfg = GameConfig::defaults(3);
    const ObservationModel obs = test::desk_model(8);
    // A defender mixture with thresholds far above any reachable belief
    // never stops; its stop probability stays near zero.
    ThresholdVector sleepy;
    sleepy.player = Player::Defender;
    sleepy.theta = {12.0, 12.0, 12.0};
    const MixedThresholdStrategy mix_d = MixedThresholdStrategy::uniform({sleepy});
    Rng rng(17);
    const MixedThresholdStrategy mix_a = test::random_mixture(Player::Attacker, 3, 1, rng);
    SelfPlayConfig h;
    h.swap_gain_exponents = true;
    h.inner_iterations = 40;
    h.br_episodes = 20;
    h.threads = 1;
    const ThresholdVector learned = learn_best_response(cfg, obs, Player::Attacker, mix_d, mix_a, h, rng);
    const auto def_policy = std::make_shared<MixedDefenderPolicy>(mix_d);
    const MixedAttackerPolicy policy(MixedThresholdStrategy::uniform({learned}), def_policy);
    // Attacks with high probability at the reachable low-belief states.
    CHECK(policy.stop_prob(3, 0.0, State::NoIntrusion) > 0.9);
}

TEST_CASE("self-play bookkeeping") {
    const GameConfig cfg = test::desk_config(2);
    const ObservationModel obs = test::desk_model(8);
    SelfPlayConfig h = tiny_config();
    h.max_outer = 1;
    h.delta = 1e-9;  // never reached; one iteration only
    const SelfPlayResult result = run_self_play(cfg, obs, h, 2024);
    // One atom appended per player per outer iteration, uniform weights.
    CHECK(result.defender.atoms.size() == 2);
    CHECK(result.attacker.atoms.size() == 2);
    for (double w : result.defender.weights) CHECK(w == doctest::Approx(0.5));
    for (double w : result.attacker.weights) CHECK(w == doctest::Approx(0.5));
    CHECK(result.history.records.size() == 1);
    CHECK(result.history.records[0].defender_buffer_size == 2);
    CHECK_FALSE(result.history.converged);

    SelfPlayConfig h3 = tiny_config();
    h3.max_outer = 3;
    h3.delta = 1e-9;
    const SelfPlayResult r3 = run_self_play(cfg, obs, h3, 2024);
    CHECK(r3.history.records.size() == 3);
    CHECK(r3.defender.atoms.size() == 4);
}

TEST_CASE("self-play is reproducible") {
    const GameConfig cfg = test::desk_config(2);
    const ObservationModel obs = test::desk_model(8);
    const SelfPlayConfig h = tiny_config();
    const SelfPlayResult a = run_self_play(cfg, obs, h, 99);
    const SelfPlayResult b = run_self_play(cfg, obs, h, 99);
    REQUIRE(a.history.records.size() == b.history.records.size());
    for (std::size_t i = 0; i < a.history.records.size(); ++i) {
        CHECK(a.history.records[i].exploitability == b.history.records[i].exploitability);
        CHECK(a.history.records[i].j_defender == b.history.records[i].j_defender);
    }
    REQUIRE(a.defender.atoms.size() == b.defender.atoms.size());
    for (std::size_t i = 0; i < a.defender.atoms.size(); ++i) {
        CHECK(a.defender.atoms[i].theta == b.defender.atoms[i].theta);
    }
}

TEST_CASE("config validation") {
    SelfPlayConfig h;
    CHECK_NOTHROW(h.validate());
    h.delta = 0.0;
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
    h = SelfPlayConfig{};
    h.epsilon = 1.5;
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
}
