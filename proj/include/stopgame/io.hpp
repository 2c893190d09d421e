#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stopgame/game.hpp"
#include "stopgame/oracle.hpp"
#include "stopgame/selfplay.hpp"
#include "stopgame/simulator.hpp"
#include "stopgame/strategy.hpp"

namespace stopgame {

// Game config file: JSON object; missing fields take the defaults. An empty
// body is a valid all-defaults config. Doubles are rendered exactly, so a
// write-then-read round-trip reproduces values bit for bit.
GameConfig load_game_config(const std::string& path);
void save_game_config(const GameConfig& cfg, const std::string& path);

ObservationModel load_observation_model(const std::string& path);
void save_observation_model(const ObservationModel& model, const std::string& path);

enum class StrategyKind { Threshold, Mixed, Grid, Baseline };

// One file format covers all strategy kinds: threshold (single vector),
// mixed (weighted vectors), grid tables, and the named defender baselines.
struct StrategyFile {
    StrategyKind kind = StrategyKind::Threshold;
    Player player = Player::Defender;
    MixedThresholdStrategy mixture;  // Threshold / Mixed
    GridStrategy grid;               // Grid
    BaselineStrategy baseline;       // Baseline

    bool belief_evaluable() const { return kind != StrategyKind::Baseline; }
};

StrategyFile load_strategy(const std::string& path);
void save_strategy(const StrategyFile& strategy, const std::string& path);
void save_mixture(const MixedThresholdStrategy& mixture, const std::string& path);
void save_grid_strategy(const GridStrategy& gs, const std::string& path);
void save_baseline(const BaselineStrategy& baseline, const std::string& path);

// Raw sample ingestion: delimited text with header metric_name,state,value.
struct MetricSamples {
    std::string metric_name;
    std::vector<double> state0;
    std::vector<double> state1;
};
std::vector<MetricSamples> load_samples_csv(const std::string& path);

// One row per step: episode,t,s,b1,l,a_D,a_A,o,r; per-episode footer row
// episode,end,terminal_reason,discounted_return.
void write_traces_csv(const std::vector<EpisodeTrace>& traces, const std::string& path);

// iteration,exploitability,J_D,mean_episode_len,mean_intrusion_len
void write_history_csv(const SelfPlayHistory& history, const std::string& path);

// l[,s],b,value and l[,s],b,stop_prob tables.
void write_values_csv(const GridValues& values, const std::string& path);
void write_grid_strategy_csv(const GridStrategy& gs, const std::string& path);

struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<std::string> config_paths;
    std::vector<std::string> outputs;
    std::string started_at;
    std::string version;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

// %.17g; exact round-trip for doubles in the delimited outputs.
std::string format_double(double value);

}  // namespace stopgame
