#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "stopgame/io.hpp"
#include "test_util.hpp"

using namespace stopgame;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("stopgame_test_" + std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

}  // namespace

TEST_CASE("empty config body yields all defaults") {
    TempDir dir;
    write_file(dir.file("empty.json"), "");
    const GameConfig cfg = load_game_config(dir.file("empty.json"));
    CHECK(cfg.L == 7);
    CHECK(cfg.R_st == 20.0);
    CHECK(cfg.gamma == 0.99);
    CHECK(cfg.phi_at(1) == doctest::Approx(0.5));
    CHECK(cfg.t_max == 200);

    write_file(dir.file("braces.json"), "{}\n");
    CHECK(load_game_config(dir.file("braces.json")).L == 7);
}

TEST_CASE("config validation errors name the field") {
    TempDir dir;
    write_file(dir.file("bad.json"), R"({"gamma": 1.2})");
    CHECK_THROWS_WITH_AS(load_game_config(dir.file("bad.json")), doctest::Contains("gamma"),
                         std::invalid_argument);
    write_file(dir.file("corrupt.json"), "{not json");
    CHECK_THROWS_AS(load_game_config(dir.file("corrupt.json")), std::invalid_argument);
    CHECK_THROWS_AS(load_game_config(dir.file("missing.json")), std::invalid_argument);
}

TEST_CASE("config round-trip is exact") {
    TempDir dir;
    GameConfig cfg = GameConfig::defaults(5);
    cfg.gamma = 0.9537219838172639;
    cfg.R_st = 17.123456789012345;
    cfg.phi = {0.5, 0.25, 0.125, 0.0625, 0.03125};
    save_game_config(cfg, dir.file("cfg.json"));
    const GameConfig loaded = load_game_config(dir.file("cfg.json"));
    CHECK(loaded.gamma == cfg.gamma);
    CHECK(loaded.R_st == cfg.R_st);
    CHECK(loaded.phi == cfg.phi);
    CHECK(loaded.t_max == cfg.t_max);
}

TEST_CASE("observation model round-trip") {
    TempDir dir;
    const ObservationModel model = test::desk_model(12);
    save_observation_model(model, dir.file("obs.json"));
    const ObservationModel loaded = load_observation_model(dir.file("obs.json"));
    CHECK(loaded.alphabet_size() == 12);
    for (int o = 0; o < 12; ++o) {
        CHECK(loaded.pmf0()(o) == model.pmf0()(o));
        CHECK(loaded.pmf1()(o) == model.pmf1()(o));
    }
}

TEST_CASE("strategy files round-trip bit-exactly") {
    TempDir dir;
    Rng rng(5);

    // Mixed threshold strategy.
    const MixedThresholdStrategy mix = test::random_mixture(Player::Attacker, 3, 4, rng);
    save_mixture(mix, dir.file("mix.json"));
    const StrategyFile mixed = load_strategy(dir.file("mix.json"));
    CHECK(mixed.kind == StrategyKind::Mixed);
    CHECK(mixed.player == Player::Attacker);
    REQUIRE(mixed.mixture.atoms.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(mixed.mixture.atoms[i].theta == mix.atoms[i].theta);
        CHECK(mixed.mixture.weights[i] == mix.weights[i]);
    }

    // Grid strategy.
    GridStrategy gs = GridStrategy::zeros(Player::Defender, 2, BeliefGrid(21));
    for (double& v : gs.table) v = rng.uniform();
    save_grid_strategy(gs, dir.file("grid.json"));
    const StrategyFile grid = load_strategy(dir.file("grid.json"));
    CHECK(grid.kind == StrategyKind::Grid);
    CHECK(grid.grid.table == gs.table);
    CHECK(grid.grid.grid.K == 21);

    // Baseline.
    save_baseline({BaselineKind::AlertThreshold, 3}, dir.file("bl.json"));
    const StrategyFile baseline = load_strategy(dir.file("bl.json"));
    CHECK(baseline.kind == StrategyKind::Baseline);
    CHECK(baseline.baseline.kind == BaselineKind::AlertThreshold);
    CHECK(baseline.baseline.threshold == 3);
    CHECK_FALSE(baseline.belief_evaluable());

    write_file(dir.file("junk.json"), R"({"kind": "nonsense"})");
    CHECK_THROWS_AS(load_strategy(dir.file("junk.json")), std::invalid_argument);
}

TEST_CASE("samples csv parsing") {
    TempDir dir;
    write_file(dir.file("samples.csv"),
               "metric_name,state,value\n"
               "alerts,0,12.5\n"
               "alerts,1,900\n"
               "alerts,0,14\n"
               "logins,0,3\n");
    const std::vector<MetricSamples> metrics = load_samples_csv(dir.file("samples.csv"));
    REQUIRE(metrics.size() == 2);
    CHECK(metrics[0].metric_name == "alerts");
    CHECK(metrics[0].state0 == std::vector<double>{12.5, 14.0});
    CHECK(metrics[0].state1 == std::vector<double>{900.0});
    CHECK(metrics[1].metric_name == "logins");

    write_file(dir.file("bad.csv"), "metric_name,state,value\nalerts,2,1\n");
    CHECK_THROWS_AS(load_samples_csv(dir.file("bad.csv")), std::invalid_argument);
    write_file(dir.file("short.csv"), "metric_name,state,value\nalerts,0\n");
    CHECK_THROWS_AS(load_samples_csv(dir.file("short.csv")), std::invalid_argument);
}

TEST_CASE("trace csv layout") {
    TempDir dir;
    EpisodeTrace trace;
    trace.steps.push_back({1, State::NoIntrusion, 0.0, 3, Action::Continue, Action::Stop, 4, 0.0});
    trace.steps.push_back({2, State::Intrusion, 0.75, 3, Action::Stop, Action::Continue,
                           std::nullopt, 20.0 / 3.0});
    trace.terminal_reason = TerminalReason::IntrusionStoppedByChance;
    trace.discounted_return = 0.99 * 20.0 / 3.0;
    write_traces_csv({trace}, dir.file("traces.csv"));

    std::ifstream in(dir.file("traces.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "episode,t,s,b1,l,a_D,a_A,o,r");
    std::getline(in, line);
    CHECK(line == "0,1,0,0,3,0,1,4,0");
    std::getline(in, line);
    CHECK(line.rfind("0,2,1,0.75,3,1,0,-1,", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("0,end,intrusion_stopped_by_chance,", 0) == 0);
}

TEST_CASE("history csv layout") {
    TempDir dir;
    SelfPlayHistory history;
    history.records.push_back({1, 3.5, 0.1, -1.25, 14.0, 2.5, 2, 2});
    write_history_csv(history, dir.file("curve.csv"));
    std::ifstream in(dir.file("curve.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "iteration,exploitability,J_D,mean_episode_len,mean_intrusion_len");
    std::getline(in, line);
    CHECK(line == "1,3.5,-1.25,14,2.5");
}

TEST_CASE("values csv layout") {
    TempDir dir;
    GridValues values;
    values.grid = BeliefGrid(11);
    values.L = 1;
    values.per_state = false;
    values.values.assign(11, -1.5);
    write_values_csv(values, dir.file("values.csv"));
    std::ifstream in(dir.file("values.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "l,b,value");
    std::getline(in, line);
    CHECK(line == "1,0,-1.5");
}

TEST_CASE("manifest") {
    TempDir dir;
    RunManifest manifest{"train", 42, {"game.json"}, {"out.csv"}, "2020-01-01T00:00:00Z", "0.1.0"};
    write_manifest(manifest, dir.file("manifest.json"));
    std::ifstream in(dir.file("manifest.json"));
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(body.find("\"command\": \"train\"") != std::string::npos);
    CHECK(body.find("out.csv") != std::string::npos);
}

TEST_CASE("format_double round-trips") {
    Rng rng(77);
    for (int i = 0; i < 1000; ++i) {
        const double x = (rng.uniform() * 2 - 1) * std::pow(10.0, rng.uniform() * 20 - 10);
        CHECK(std::stod(format_double(x)) == x);
    }
}
