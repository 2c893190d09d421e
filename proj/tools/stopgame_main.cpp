#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "stopgame/io.hpp"
#include "stopgame/oracle.hpp"
#include "stopgame/selfplay.hpp"
#include "stopgame/simulator.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using namespace stopgame;

std::string timestamp_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

// Keeps the wrapped policy alive for the duration of the agent.
class OwningBeliefAgent final : public DefenderAgent {
public:
    explicit OwningBeliefAgent(std::shared_ptr<const DefenderPolicy> policy)
        : policy_(std::move(policy)) {}
    double stop_prob(const DefenderView& view) const override {
        return policy_->stop_prob(view.l, view.b1);
    }

private:
    std::shared_ptr<const DefenderPolicy> policy_;
};

struct LoadedDefender {
    std::shared_ptr<const DefenderPolicy> policy;  // null for baselines
    std::shared_ptr<const DefenderAgent> agent;
};

LoadedDefender make_defender(const StrategyFile& file) {
    LoadedDefender loaded;
    switch (file.kind) {
        case StrategyKind::Threshold:
        case StrategyKind::Mixed:
            if (file.player != Player::Defender) {
                throw std::invalid_argument("defender strategy file holds an attacker strategy");
            }
            loaded.policy = std::make_shared<MixedDefenderPolicy>(file.mixture);
            break;
        case StrategyKind::Grid:
            if (file.player != Player::Defender) {
                throw std::invalid_argument("defender strategy file holds an attacker strategy");
            }
            loaded.policy = std::make_shared<GridDefenderPolicy>(file.grid);
            break;
        case StrategyKind::Baseline:
            loaded.agent = std::make_shared<BaselineDefenderAgent>(file.baseline);
            return loaded;
    }
    loaded.agent = std::make_shared<OwningBeliefAgent>(loaded.policy);
    return loaded;
}

std::shared_ptr<const AttackerPolicy> make_attacker(const StrategyFile& file,
                                                    std::shared_ptr<const DefenderPolicy> bind) {
    if (file.player != Player::Attacker) {
        throw std::invalid_argument("attacker strategy file holds a defender strategy");
    }
    switch (file.kind) {
        case StrategyKind::Threshold:
        case StrategyKind::Mixed:
            if (!bind) {
                throw std::invalid_argument(
                    "threshold attacker strategies need a defender strategy to bind to; "
                    "pass --attacker-bind");
            }
            return std::make_shared<MixedAttackerPolicy>(file.mixture, std::move(bind));
        case StrategyKind::Grid:
            return std::make_shared<GridAttackerPolicy>(file.grid);
        case StrategyKind::Baseline:
            break;
    }
    throw std::invalid_argument("no baseline attacker strategies exist");
}

BeliefFallback parse_fallback(const std::string& name) {
    if (name == "carry") return BeliefFallback::CarryForward;
    if (name == "likelihood") return BeliefFallback::LikelihoodOnly;
    if (name == "error") return BeliefFallback::Error;
    throw std::invalid_argument("fallback must be carry|likelihood|error");
}

int round_to_symbol(double value, int alphabet) {
    const int symbol = static_cast<int>(std::lround(value));
    return std::clamp(symbol, 0, alphabet - 1);
}

int run_fit_obs(const std::string& samples_path, const std::string& components,
                int alphabet, const std::string& out, const std::string& metric_filter) {
    int k0 = 2, k1 = 3;
    if (std::sscanf(components.c_str(), "%d,%d", &k0, &k1) != 2) {
        throw std::invalid_argument("--components expects two integers, e.g. 2,3");
    }
    const std::vector<MetricSamples> metrics = load_samples_csv(samples_path);

    // Rank candidate metrics by the KL divergence of their empirical pmfs.
    std::vector<std::pair<double, const MetricSamples*>> ranking;
    for (const MetricSamples& m : metrics) {
        std::vector<int> sym0, sym1;
        for (double v : m.state0) sym0.push_back(round_to_symbol(v, alphabet));
        for (double v : m.state1) sym1.push_back(round_to_symbol(v, alphabet));
        const DiscretePmf p0 = empirical_pmf(sym0, alphabet, 1e-6);
        const DiscretePmf p1 = empirical_pmf(sym1, alphabet, 1e-6);
        ranking.emplace_back(kl_divergence(p0, p1), &m);
    }
    std::sort(ranking.begin(), ranking.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::cout << "metric ranking by empirical KL(f0 || f1):\n";
    for (const auto& [kl, m] : ranking) {
        std::cout << "  " << m->metric_name << ": " << kl << '\n';
    }

    const MetricSamples* chosen = ranking.front().second;
    if (!metric_filter.empty()) {
        chosen = nullptr;
        for (const MetricSamples& m : metrics) {
            if (m.metric_name == metric_filter) chosen = &m;
        }
        if (chosen == nullptr) {
            throw std::invalid_argument("metric '" + metric_filter + "' not present in samples");
        }
    }
    std::cout << "fitting metric '" << chosen->metric_name << "' (" << chosen->state0.size()
              << " no-intrusion samples, " << chosen->state1.size() << " intrusion samples)\n";

    const GmmFitResult fit0 = fit_gmm_em(chosen->state0, k0, alphabet);
    const GmmFitResult fit1 = fit_gmm_em(chosen->state1, k1, alphabet);
    if (!fit0.converged || !fit1.converged) {
        std::cout << "warning: EM stopped at the iteration cap; best iterate kept\n";
    }
    const ObservationModel model(fit0.pmf, fit1.pmf);

    RunManifest manifest{"fit-obs", 0, {samples_path}, {out}, timestamp_now(), kVersion};
    write_manifest(manifest, out + ".manifest.json");
    save_observation_model(model, out);

    const Tp2Result tp2 = tp2_check(model);
    std::cout << "tp2: " << (tp2.is_tp2 ? "yes" : "no");
    if (!tp2.is_tp2) {
        std::cout << " (first violating minor at symbols " << tp2.violation->first << ','
                  << tp2.violation->second << ")";
    }
    std::cout << '\n';
    std::cout << "kl(f0 || f1) = " << format_double(kl_divergence(model.pmf0(), model.pmf1()))
              << '\n';
    std::cout << "wrote " << out << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver toolkit for a two-player optimal-stopping intrusion response game"};
    app.require_subcommand(1);
    app.fallthrough();

    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    bool strict = false;
    app.add_option("--threads", threads, "Worker thread cap for Monte Carlo evaluation");
    app.add_flag("--strict", strict, "Exit nonzero on numeric warnings (non-convergence)");

    // fit-obs
    auto* fit = app.add_subcommand("fit-obs", "Fit per-state observation mixtures from samples");
    std::string fit_samples, fit_components = "2,3", fit_out, fit_metric;
    int fit_alphabet = 100;
    fit->add_option("--samples", fit_samples, "CSV with metric_name,state,value rows")->required();
    fit->add_option("--components", fit_components, "Mixture sizes k0,k1 per state");
    fit->add_option("--alphabet", fit_alphabet, "Observation alphabet size");
    fit->add_option("--metric", fit_metric, "Metric to fit (default: best by KL ranking)");
    fit->add_option("--out", fit_out, "Output observation-model file")->required();

    // train
    auto* train = app.add_subcommand("train", "Learn equilibrium strategies through self-play");
    std::string train_game, train_obs, train_out_dir;
    std::uint64_t train_seed = 0;
    SelfPlayConfig sp;
    int checkpoint_every = 50;
    train->add_option("--game", train_game, "Game config file")->required();
    train->add_option("--obs", train_obs, "Observation model file")->required();
    train->add_option("--seed", train_seed, "Random seed")->required();
    train->add_option("--out-dir", train_out_dir, "Output directory")->required();
    train->add_option("--iters", sp.max_outer, "Outer iteration cap");
    train->add_option("--inner", sp.inner_iterations, "Gradient steps per best response");
    train->add_option("--br-episodes", sp.br_episodes, "Episodes per objective evaluation");
    train->add_option("--eval-episodes", sp.eval_episodes, "Episodes per metric evaluation");
    train->add_option("--grid", sp.grid_points, "Oracle belief-grid size");
    train->add_option("--delta", sp.delta, "Termination exploitability");
    train->add_option("--checkpoint-every", checkpoint_every, "Checkpoint interval (iterations)");
    train->add_flag("--swap-spsa-exponents", sp.swap_gain_exponents,
                    "Use the standard gain-exponent assignment instead of the published one");
    train->add_flag("--learned-br-exploitability", sp.learned_br_exploitability,
                    "Measure exploitability with learned best responses instead of the grid oracle");

    // exploit
    auto* exploit = app.add_subcommand("exploit", "Estimate exploitability of a strategy pair");
    std::string ex_game, ex_obs, ex_defender, ex_attacker;
    int ex_grid = 201, ex_episodes = 2000;
    std::uint64_t ex_seed = 0;
    exploit->add_option("--game", ex_game)->required();
    exploit->add_option("--obs", ex_obs)->required();
    exploit->add_option("--defender", ex_defender, "Defender strategy file")->required();
    exploit->add_option("--attacker", ex_attacker, "Attacker strategy file")->required();
    exploit->add_option("--grid", ex_grid, "Oracle belief-grid size");
    exploit->add_option("--episodes", ex_episodes, "Monte Carlo episodes per term");
    exploit->add_option("--seed", ex_seed)->required();

    // value
    auto* value = app.add_subcommand("value", "Approximate minimax value table");
    std::string val_game, val_obs, val_out;
    int val_grid = 201;
    value->add_option("--game", val_game)->required();
    value->add_option("--obs", val_obs)->required();
    value->add_option("--grid", val_grid, "Belief-grid size");
    value->add_option("--out", val_out, "Output value table CSV")->required();

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run game episodes and export traces");
    std::string sim_game, sim_obs, sim_defender, sim_attacker, sim_out, sim_bind;
    std::string sim_fallback = "carry";
    int sim_episodes = 100;
    std::uint64_t sim_seed = 0;
    simulate->add_option("--game", sim_game)->required();
    simulate->add_option("--obs", sim_obs)->required();
    simulate->add_option("--defender", sim_defender, "Defender strategy file")->required();
    simulate->add_option("--attacker", sim_attacker, "Attacker strategy file")->required();
    simulate->add_option("--episodes", sim_episodes)->required();
    simulate->add_option("--seed", sim_seed)->required();
    simulate->add_option("--out", sim_out, "Output trace CSV")->required();
    simulate->add_option("--attacker-bind", sim_bind,
                         "Defender strategy the attacker's thresholds are bound to "
                         "(default: --defender when belief-evaluable)");
    simulate->add_option("--fallback", sim_fallback,
                         "Degenerate belief-update handling: carry|likelihood|error");

    // baseline
    auto* baseline = app.add_subcommand("baseline", "Write a baseline defender strategy file");
    std::string bl_name, bl_out;
    int bl_threshold = 1;
    baseline->add_option("--name", bl_name, "alert-threshold|intrusion-oracle")->required();
    baseline->add_option("--threshold", bl_threshold, "Alert threshold (alert-threshold only)");
    baseline->add_option("--out", bl_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        bool warned = false;
        if (*fit) {
            const int rc = run_fit_obs(fit_samples, fit_components, fit_alphabet, fit_out, fit_metric);
            if (rc != 0) return rc;
        } else if (*train) {
            const GameConfig cfg = load_game_config(train_game);
            const ObservationModel obs = load_observation_model(train_obs);
            sp.threads = threads;
            sp.validate();
            namespace fs = std::filesystem;
            fs::create_directories(train_out_dir);
            const std::string curve_path = train_out_dir + "/learning_curve.csv";
            const std::string def_path = train_out_dir + "/defender_mixture.json";
            const std::string atk_path = train_out_dir + "/attacker_mixture.json";
            RunManifest manifest{"train", train_seed, {train_game, train_obs},
                                 {curve_path, def_path, atk_path},
                                 timestamp_now(), kVersion};
            SelfPlayHistory live_history;
            const SelfPlayCallback callback = [&](const SelfPlayRecord& record,
                                                  const MixedThresholdStrategy& mix_d,
                                                  const MixedThresholdStrategy& mix_a) {
                live_history.records.push_back(record);
                write_history_csv(live_history, curve_path);
                std::cout << "iter " << record.iteration << ": exploitability "
                          << record.exploitability << " (J_D " << record.j_defender << ")\n";
                if (checkpoint_every > 0 && record.iteration % checkpoint_every == 0) {
                    const std::string suffix = std::to_string(record.iteration) + ".json";
                    save_mixture(mix_d, train_out_dir + "/defender_ckpt_" + suffix);
                    save_mixture(mix_a, train_out_dir + "/attacker_ckpt_" + suffix);
                    manifest.outputs.push_back(train_out_dir + "/defender_ckpt_" + suffix);
                    manifest.outputs.push_back(train_out_dir + "/attacker_ckpt_" + suffix);
                    write_manifest(manifest, train_out_dir + "/manifest.json");
                }
            };
            write_manifest(manifest, train_out_dir + "/manifest.json");
            const SelfPlayResult result = run_self_play(cfg, obs, sp, train_seed, callback);
            write_history_csv(result.history, curve_path);
            save_mixture(result.defender, def_path);
            save_mixture(result.attacker, atk_path);
            write_manifest(manifest, train_out_dir + "/manifest.json");
            const double final_delta = result.history.records.empty()
                                           ? std::numeric_limits<double>::quiet_NaN()
                                           : result.history.records.back().exploitability;
            std::cout << (result.history.converged ? "converged" : "iteration cap reached")
                      << " after " << result.history.records.size()
                      << " iterations; final exploitability " << final_delta << '\n';
            if (!result.history.converged) warned = true;
        } else if (*exploit) {
            const GameConfig cfg = load_game_config(ex_game);
            const ObservationModel obs = load_observation_model(ex_obs);
            const StrategyFile def_file = load_strategy(ex_defender);
            if (!def_file.belief_evaluable()) {
                throw std::invalid_argument(
                    "exploit needs a belief-evaluable defender strategy (not a baseline)");
            }
            const LoadedDefender defender = make_defender(def_file);
            const auto attacker = make_attacker(load_strategy(ex_attacker), defender.policy);
            const ExploitabilityReport report =
                exploitability(cfg, obs, *defender.policy, *attacker, BeliefGrid(ex_grid),
                               ex_episodes, ex_seed, OracleOptions{}, threads);
            std::cout << "exploitability " << format_double(report.value) << " ci95 ["
                      << format_double(report.value - 1.96 * report.std_error) << ", "
                      << format_double(report.value + 1.96 * report.std_error) << "]\n"
                      << "defender_gain " << format_double(report.defender_gain)
                      << " attacker_gain " << format_double(report.attacker_gain) << '\n';
        } else if (*value) {
            const GameConfig cfg = load_game_config(val_game);
            const ObservationModel obs = load_observation_model(val_obs);
            RunManifest manifest{"value", 0, {val_game, val_obs}, {val_out}, timestamp_now(), kVersion};
            write_manifest(manifest, val_out + ".manifest.json");
            const GridValues values = game_value_vi(cfg, obs, BeliefGrid(val_grid));
            write_values_csv(values, val_out);
            std::cout << "wrote " << val_out << " (residual " << values.residual << ", "
                      << values.sweeps << " sweeps)\n";
            if (!values.converged) {
                std::cout << "warning: value iteration hit the sweep cap\n";
                warned = true;
            }
        } else if (*simulate) {
            const GameConfig cfg = load_game_config(sim_game);
            const ObservationModel obs = load_observation_model(sim_obs);
            const StrategyFile def_file = load_strategy(sim_defender);
            const LoadedDefender defender = make_defender(def_file);
            std::shared_ptr<const DefenderPolicy> bind = defender.policy;
            if (!sim_bind.empty()) {
                const StrategyFile bind_file = load_strategy(sim_bind);
                if (!bind_file.belief_evaluable()) {
                    throw std::invalid_argument("--attacker-bind must be belief-evaluable");
                }
                bind = make_defender(bind_file).policy;
            }
            const auto attacker = make_attacker(load_strategy(sim_attacker), bind);
            RunManifest manifest{"simulate", sim_seed,
                                 {sim_game, sim_obs, sim_defender, sim_attacker},
                                 {sim_out}, timestamp_now(), kVersion};
            write_manifest(manifest, sim_out + ".manifest.json");
            SimOptions options;
            options.fallback = parse_fallback(sim_fallback);
            options.threads = threads;
            const std::vector<EpisodeTrace> traces =
                run_episodes(cfg, obs, *defender.agent, *attacker, *attacker, sim_episodes,
                             sim_seed, options);
            write_traces_csv(traces, sim_out);
            const EpisodeSummary stats = episode_stats(traces);
            int degenerate = 0;
            for (const EpisodeTrace& t : traces) degenerate += t.degenerate_updates;
            std::cout << "episodes " << traces.size() << " mean_reward "
                      << format_double(stats.mean_return) << " mean_episode_len "
                      << format_double(stats.mean_episode_length) << " mean_intrusion_len "
                      << format_double(stats.mean_intrusion_length) << '\n';
            if (degenerate > 0) {
                std::cout << "note: " << degenerate << " degenerate belief updates\n";
            }
            std::cout << "wrote " << sim_out << '\n';
        } else if (*baseline) {
            BaselineStrategy bl;
            if (bl_name == "alert-threshold") {
                bl.kind = BaselineKind::AlertThreshold;
                bl.threshold = bl_threshold;
            } else if (bl_name == "intrusion-oracle") {
                bl.kind = BaselineKind::IntrusionTimeOracle;
            } else {
                throw std::invalid_argument("--name must be alert-threshold or intrusion-oracle");
            }
            bl.validate();
            RunManifest manifest{"baseline", 0, {}, {bl_out}, timestamp_now(), kVersion};
            write_manifest(manifest, bl_out + ".manifest.json");
            save_baseline(bl, bl_out);
            std::cout << "wrote " << bl_out << '\n';
        }
        if (warned && strict) return 3;
        return 0;
    } catch (const DegenerateUpdateError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
