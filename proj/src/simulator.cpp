#include "stopgame/simulator.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace stopgame {

const char* to_string(TerminalReason reason) {
    switch (reason) {
        case TerminalReason::FinalDefenderStop: return "final_defender_stop";
        case TerminalReason::IntrusionStoppedByChance: return "intrusion_stopped_by_chance";
        case TerminalReason::AttackerAborted: return "attacker_aborted";
        case TerminalReason::Truncated: return "truncated";
    }
    return "unknown";
}

EpisodeTrace run_episode(const GameConfig& cfg, const ObservationModel& obs,
                         const DefenderAgent& defender, const AttackerPolicy& attacker,
                         const AttackerPolicy& attacker_belief_model, Rng& rng,
                         BeliefFallback fallback) {
    cfg.validate();
    EpisodeTrace trace;
    State s = State::NoIntrusion;
    double b1 = 0.0;
    int l = cfg.L;
    std::optional<int> last_obs;
    bool intrusion_started = false;
    int stops_taken = 0;
    double discount = 1.0;
    bool terminal = false;

    for (int t = 1; t <= cfg.t_max; ++t) {
        if (s == State::Intrusion) {
            if (!trace.intrusion_start) trace.intrusion_start = t;
            intrusion_started = true;
            ++trace.intrusion_length;
        }
        const DefenderView view{t, l, b1, last_obs, intrusion_started, stops_taken};
        const Action a_d = rng.bernoulli(defender.stop_prob(view)) ? Action::Stop : Action::Continue;
        const Action a_a =
            rng.bernoulli(attacker.stop_prob(l, b1, s)) ? Action::Stop : Action::Continue;
        const ActionPair pair{a_d, a_a};
        const double r = reward(s, pair, l, cfg);
        trace.discounted_return += discount * r;
        discount *= cfg.gamma;
        trace.steps.push_back({t, s, b1, l, a_d, a_a, std::nullopt, r});

        const State s_next = sample_transition(s, pair, l, cfg, rng);
        if (s_next == State::Terminal) {
            if (s == State::Intrusion && a_a == Action::Stop) {
                trace.terminal_reason = TerminalReason::AttackerAborted;
            } else if (a_d == Action::Stop && l == 1) {
                trace.terminal_reason = TerminalReason::FinalDefenderStop;
            } else {
                trace.terminal_reason = TerminalReason::IntrusionStoppedByChance;
            }
            terminal = true;
            break;
        }
        const int o = sample_observation(obs, s_next, rng);
        const BeliefUpdateResult update =
            belief_update_with_fallback(b1, a_d, o, attacker_belief_model, l, obs, cfg, fallback);
        trace.steps.back().o = o;
        b1 = update.b1;
        trace.degenerate_updates += update.degenerate ? 1 : 0;
        last_obs = o;
        s = s_next;
        if (a_d == Action::Stop) {
            --l;
            ++stops_taken;
        }
    }
    if (!terminal) trace.terminal_reason = TerminalReason::Truncated;
    return trace;
}

std::vector<EpisodeTrace> run_episodes(const GameConfig& cfg, const ObservationModel& obs,
                                       const DefenderAgent& defender,
                                       const AttackerPolicy& attacker,
                                       const AttackerPolicy& attacker_belief_model,
                                       int n_episodes, std::uint64_t seed,
                                       const SimOptions& options) {
    if (n_episodes < 1) throw std::invalid_argument("n_episodes must be >= 1");
    std::vector<EpisodeTrace> traces(static_cast<std::size_t>(n_episodes));
    auto worker = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
            traces[static_cast<std::size_t>(i)] = run_episode(
                cfg, obs, defender, attacker, attacker_belief_model, rng, options.fallback);
        }
    };
    const int threads = std::max(1, options.threads);
    if (threads == 1 || n_episodes < 2 * threads) {
        worker(0, n_episodes);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_episodes + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            const int begin = w * chunk;
            const int end = std::min(n_episodes, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (std::thread& th : pool) th.join();
    }
    return traces;
}

ObjectiveEstimate estimate_objective(const GameConfig& cfg, const ObservationModel& obs,
                                     const DefenderAgent& defender, const AttackerPolicy& attacker,
                                     const AttackerPolicy& attacker_belief_model, int n_episodes,
                                     std::uint64_t seed, const SimOptions& options) {
    const std::vector<EpisodeTrace> traces =
        run_episodes(cfg, obs, defender, attacker, attacker_belief_model, n_episodes, seed, options);

    // Kahan summation in episode order keeps the result independent of the
    // thread partitioning.
    double sum = 0.0, comp = 0.0;
    for (const EpisodeTrace& trace : traces) {
        const double y = trace.discounted_return - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    ObjectiveEstimate est;
    est.n_episodes = n_episodes;
    est.mean = sum / n_episodes;
    if (n_episodes > 1) {
        double sq = 0.0;
        for (const EpisodeTrace& trace : traces) {
            const double d = trace.discounted_return - est.mean;
            sq += d * d;
        }
        est.std_error = std::sqrt(sq / (n_episodes - 1) / n_episodes);
    }
    est.ci95 = {est.mean - 1.96 * est.std_error, est.mean + 1.96 * est.std_error};
    return est;
}

EpisodeSummary episode_stats(const std::vector<EpisodeTrace>& traces) {
    if (traces.empty()) throw std::invalid_argument("episode_stats: no traces");
    EpisodeSummary summary;
    std::size_t max_t = 0;
    for (const EpisodeTrace& trace : traces) {
        summary.mean_return += trace.discounted_return;
        summary.mean_intrusion_length += trace.intrusion_length;
        summary.mean_episode_length += static_cast<double>(trace.steps.size());
        for (const EpisodeStep& step : trace.steps) {
            max_t = std::max(max_t, static_cast<std::size_t>(step.t));
        }
    }
    const double n = static_cast<double>(traces.size());
    summary.mean_return /= n;
    summary.mean_intrusion_length /= n;
    summary.mean_episode_length /= n;
    summary.stop_time_histogram.assign(max_t, 0);
    for (const EpisodeTrace& trace : traces) {
        for (const EpisodeStep& step : trace.steps) {
            if (step.a_d == Action::Stop) {
                ++summary.stop_time_histogram[static_cast<std::size_t>(step.t - 1)];
            }
        }
    }
    return summary;
}

}  // namespace stopgame
