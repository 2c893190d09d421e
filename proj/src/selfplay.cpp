#include "stopgame/selfplay.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "stopgame/simulator.hpp"

namespace stopgame {

namespace {

ThresholdVector random_threshold(Player player, int L, Rng& rng) {
    ThresholdVector tv;
    tv.player = player;
    const int dim = player == Player::Defender ? L : 2 * L;
    tv.theta.resize(static_cast<std::size_t>(dim));
    for (double& v : tv.theta) v = rng.rademacher();
    return tv;
}

MixedThresholdStrategy single_atom(Player player, std::vector<double> theta) {
    ThresholdVector tv;
    tv.player = player;
    tv.theta = std::move(theta);
    return MixedThresholdStrategy::uniform({tv});
}

// Inner loop shared by both players: N SPSA ascent steps on the supplied
// objective from a random +/-1 start.
std::vector<double> spsa_ascent(int dim, const std::function<double(const std::vector<double>&)>& objective,
                                const SelfPlayConfig& h, Rng& rng) {
    std::vector<double> theta(static_cast<std::size_t>(dim));
    for (double& v : theta) v = rng.rademacher();
    for (int n = 1; n <= h.inner_iterations; ++n) {
        const SpsaGains gains = spsa_gains(n, h);
        const std::vector<double> grad = spsa_gradient(objective, theta, gains.c_n, rng);
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += gains.a_n * grad[i];
    }
    return theta;
}

}  // namespace

void SelfPlayConfig::validate() const {
    if (!(a > 0.0 && c > 0.0 && big_a > 0.0)) throw std::invalid_argument("SPSA gains must be positive");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must be in (0,1]");
    if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must be in (0,1]");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
    if (inner_iterations < 0) throw std::invalid_argument("inner_iterations must be >= 0");
    if (max_outer < 1) throw std::invalid_argument("max_outer must be >= 1");
    if (br_episodes < 1 || eval_episodes < 1) throw std::invalid_argument("episode counts must be >= 1");
    if (grid_points < 11) throw std::invalid_argument("grid_points must be >= 11");
}

SpsaGains spsa_gains(int n, const SelfPlayConfig& h) {
    if (n < 1) throw std::invalid_argument("gain index must be >= 1");
    const double step_exp = h.swap_gain_exponents ? h.lambda : h.epsilon;
    const double pert_exp = h.swap_gain_exponents ? h.epsilon : h.lambda;
    return {h.a / std::pow(n + h.big_a, step_exp), h.c / std::pow(n, pert_exp)};
}

std::vector<double> spsa_gradient(const std::function<double(const std::vector<double>&)>& evaluate,
                                  const std::vector<double>& theta, double c_n, Rng& rng) {
    if (!(c_n > 0.0)) throw std::invalid_argument("c_n must be > 0");
    const std::size_t dim = theta.size();
    std::vector<double> delta(dim);
    for (double& d : delta) d = rng.rademacher();
    std::vector<double> high = theta;
    std::vector<double> low = theta;
    for (std::size_t i = 0; i < dim; ++i) {
        high[i] += c_n * delta[i];
        low[i] -= c_n * delta[i];
    }
    const double r_high = evaluate(high);
    const double r_low = evaluate(low);
    if (!std::isfinite(r_high) || !std::isfinite(r_low)) {
        throw std::runtime_error("spsa_gradient: non-finite objective evaluation");
    }
    std::vector<double> grad(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        grad[i] = (r_high - r_low) / (2.0 * c_n * delta[i]);
    }
    return grad;
}

ThresholdVector learn_defender_best_response(const GameConfig& cfg, const ObservationModel& obs,
                                             const AttackerPolicy& opponent,
                                             const SelfPlayConfig& h, Rng& rng) {
    SimOptions sim;
    sim.fallback = BeliefFallback::LikelihoodOnly;
    sim.threads = h.threads;
    auto objective = [&](const std::vector<double>& theta) {
        const MixedDefenderPolicy candidate(single_atom(Player::Defender, theta));
        const BeliefDefenderAgent agent(candidate);
        return estimate_objective(cfg, obs, agent, opponent, opponent, h.br_episodes,
                                  rng.next_u64(), sim)
            .mean;
    };
    ThresholdVector tv;
    tv.player = Player::Defender;
    tv.theta = spsa_ascent(cfg.L, objective, h, rng);
    return tv;
}

ThresholdVector learn_best_response(const GameConfig& cfg, const ObservationModel& obs,
                                    Player player, const MixedThresholdStrategy& opponent,
                                    const MixedThresholdStrategy& own_mixed,
                                    const SelfPlayConfig& h, Rng& rng) {
    h.validate();
    if (player == Player::Defender) {
        // The opponent's thresholds live in defender-stop-probability space
        // and stay bound to the current defender mixture, not the candidate.
        auto own_policy = std::make_shared<MixedDefenderPolicy>(own_mixed);
        const MixedAttackerPolicy opponent_policy(opponent, own_policy);
        return learn_defender_best_response(cfg, obs, opponent_policy, h, rng);
    }
    auto defender_policy = std::make_shared<MixedDefenderPolicy>(opponent);
    const BeliefDefenderAgent defender_agent(*defender_policy);
    // The defender's belief update assumes the announced attacker mixture.
    const MixedAttackerPolicy belief_model(own_mixed, defender_policy);
    SimOptions sim;
    sim.fallback = BeliefFallback::LikelihoodOnly;
    sim.threads = h.threads;
    auto objective = [&](const std::vector<double>& theta) {
        const MixedAttackerPolicy candidate(single_atom(Player::Attacker, theta), defender_policy);
        const double j_defender = estimate_objective(cfg, obs, defender_agent, candidate,
                                                     belief_model, h.br_episodes, rng.next_u64(),
                                                     sim)
                                      .mean;
        return -j_defender;
    };
    ThresholdVector tv;
    tv.player = Player::Attacker;
    tv.theta = spsa_ascent(2 * cfg.L, objective, h, rng);
    return tv;
}

SelfPlayResult run_self_play(const GameConfig& cfg, const ObservationModel& obs,
                             const SelfPlayConfig& h, std::uint64_t seed,
                             const SelfPlayCallback& callback) {
    cfg.validate();
    h.validate();
    Rng rng(seed);

    std::vector<ThresholdVector> defender_buffer{random_threshold(Player::Defender, cfg.L, rng)};
    std::vector<ThresholdVector> attacker_buffer{random_threshold(Player::Attacker, cfg.L, rng)};
    MixedThresholdStrategy mix_d = MixedThresholdStrategy::uniform(defender_buffer);
    MixedThresholdStrategy mix_a = MixedThresholdStrategy::uniform(attacker_buffer);

    const BeliefGrid grid(h.grid_points);
    OracleOptions oracle_options;
    SimOptions sim;
    sim.fallback = BeliefFallback::LikelihoodOnly;
    sim.threads = h.threads;

    SelfPlayResult result;
    for (int iteration = 1; iteration <= h.max_outer; ++iteration) {
        // Defender first; the attacker responds to the not-yet-updated
        // defender mixture. Buffers and mixtures update after both.
        const ThresholdVector new_d = learn_best_response(cfg, obs, Player::Defender, mix_a, mix_d, h, rng);
        const ThresholdVector new_a = learn_best_response(cfg, obs, Player::Attacker, mix_d, mix_a, h, rng);
        defender_buffer.push_back(new_d);
        attacker_buffer.push_back(new_a);
        mix_d = MixedThresholdStrategy::uniform(defender_buffer);
        mix_a = MixedThresholdStrategy::uniform(attacker_buffer);

        auto defender_policy = std::make_shared<MixedDefenderPolicy>(mix_d);
        const MixedAttackerPolicy attacker_policy(mix_a, defender_policy);

        SelfPlayRecord record;
        record.iteration = iteration;
        if (h.learned_br_exploitability) {
            const ThresholdVector br_d = learn_best_response(cfg, obs, Player::Defender, mix_a, mix_d, h, rng);
            const ThresholdVector br_a = learn_best_response(cfg, obs, Player::Attacker, mix_d, mix_a, h, rng);
            const MixedDefenderPolicy br_d_policy(MixedThresholdStrategy::uniform({br_d}));
            const BeliefDefenderAgent br_d_agent(br_d_policy);
            const MixedAttackerPolicy br_a_policy(MixedThresholdStrategy::uniform({br_a}),
                                                  defender_policy);
            const BeliefDefenderAgent mix_d_agent(*defender_policy);
            const ObjectiveEstimate term_d = estimate_objective(
                cfg, obs, br_d_agent, attacker_policy, attacker_policy, h.eval_episodes,
                rng.next_u64(), sim);
            const ObjectiveEstimate term_a = estimate_objective(
                cfg, obs, mix_d_agent, br_a_policy, attacker_policy, h.eval_episodes,
                rng.next_u64(), sim);
            record.exploitability = term_d.mean - term_a.mean;
            record.exploitability_std_error = std::sqrt(term_d.std_error * term_d.std_error +
                                                        term_a.std_error * term_a.std_error);
        } else {
            const ExploitabilityReport report =
                exploitability(cfg, obs, *defender_policy, attacker_policy, grid, h.eval_episodes,
                               rng.next_u64(), oracle_options, h.threads);
            record.exploitability = report.value;
            record.exploitability_std_error = report.std_error;
        }

        const BeliefDefenderAgent defender_agent(*defender_policy);
        const std::vector<EpisodeTrace> traces =
            run_episodes(cfg, obs, defender_agent, attacker_policy, attacker_policy,
                         h.eval_episodes, rng.next_u64(), sim);
        const EpisodeSummary stats = episode_stats(traces);
        record.j_defender = stats.mean_return;
        record.mean_episode_length = stats.mean_episode_length;
        record.mean_intrusion_length = stats.mean_intrusion_length;
        record.defender_buffer_size = static_cast<int>(defender_buffer.size());
        record.attacker_buffer_size = static_cast<int>(attacker_buffer.size());
        result.history.records.push_back(record);
        if (callback) callback(record, mix_d, mix_a);

        if (record.exploitability < h.delta) {
            result.history.converged = true;
            break;
        }
    }
    result.defender = std::move(mix_d);
    result.attacker = std::move(mix_a);
    return result;
}

}  // namespace stopgame
