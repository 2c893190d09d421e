#include "stopgame/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace stopgame {

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string body = buffer.str();
    // An empty body is treated as an empty object (all defaults).
    if (body.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open file for writing: " + path);
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

Player parse_player(const std::string& name) {
    if (name == "defender") return Player::Defender;
    if (name == "attacker") return Player::Attacker;
    throw std::invalid_argument("player must be 'defender' or 'attacker', got '" + name + "'");
}

const char* player_name(Player p) { return p == Player::Defender ? "defender" : "attacker"; }

}  // namespace

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

GameConfig load_game_config(const std::string& path) {
    const json j = read_json_file(path);
    if (!j.is_object()) throw std::invalid_argument(path + ": config must be a JSON object");
    GameConfig cfg = GameConfig::defaults(j.value("L", 7));
    try {
        cfg.R_st = j.value("R_st", cfg.R_st);
        cfg.R_cost = j.value("R_cost", cfg.R_cost);
        cfg.R_int = j.value("R_int", cfg.R_int);
        cfg.gamma = j.value("gamma", cfg.gamma);
        cfg.t_max = j.value("t_max", cfg.t_max);
        if (j.contains("phi")) cfg.phi = j.at("phi").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

void save_game_config(const GameConfig& cfg, const std::string& path) {
    json j;
    j["L"] = cfg.L;
    j["R_st"] = cfg.R_st;
    j["R_cost"] = cfg.R_cost;
    j["R_int"] = cfg.R_int;
    j["gamma"] = cfg.gamma;
    j["phi"] = cfg.phi;
    j["t_max"] = cfg.t_max;
    write_json_file(path, j);
}

ObservationModel load_observation_model(const std::string& path) {
    const json j = read_json_file(path);
    try {
        DiscretePmf pmf0{j.at("pmf0").get<std::vector<double>>()};
        DiscretePmf pmf1{j.at("pmf1").get<std::vector<double>>()};
        if (j.contains("alphabet_size") &&
            j.at("alphabet_size").get<int>() != pmf0.size()) {
            throw std::invalid_argument(path + ": alphabet_size does not match pmf length");
        }
        return ObservationModel(std::move(pmf0), std::move(pmf1));
    } catch (const json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

void save_observation_model(const ObservationModel& model, const std::string& path) {
    json j;
    j["alphabet_size"] = model.alphabet_size();
    j["pmf0"] = model.pmf0().probs;
    j["pmf1"] = model.pmf1().probs;
    write_json_file(path, j);
}

StrategyFile load_strategy(const std::string& path) {
    const json j = read_json_file(path);
    StrategyFile file;
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "threshold" || kind == "mixed") {
            file.kind = kind == "mixed" ? StrategyKind::Mixed : StrategyKind::Threshold;
            file.player = parse_player(j.at("player").get<std::string>());
            std::vector<ThresholdVector> atoms;
            std::vector<double> weights;
            bool has_weights = true;
            for (const json& atom : j.at("atoms")) {
                ThresholdVector tv;
                tv.player = file.player;
                tv.theta = atom.at("theta").get<std::vector<double>>();
                atoms.push_back(std::move(tv));
                has_weights = has_weights && atom.contains("weight");
                weights.push_back(atom.value("weight", 0.0));
            }
            MixedThresholdStrategy mix;
            if (has_weights) {
                mix.atoms = std::move(atoms);
                mix.weights = std::move(weights);
            } else {
                mix = MixedThresholdStrategy::uniform(std::move(atoms));
            }
            mix.validate();
            file.mixture = std::move(mix);
        } else if (kind == "grid") {
            file.kind = StrategyKind::Grid;
            file.player = parse_player(j.at("player").get<std::string>());
            GridStrategy gs;
            gs.player = file.player;
            gs.L = j.at("L").get<int>();
            gs.grid = BeliefGrid(j.at("grid_points").get<int>());
            gs.table = j.at("table").get<std::vector<double>>();
            gs.validate();
            file.grid = std::move(gs);
        } else if (kind == "baseline") {
            file.kind = StrategyKind::Baseline;
            file.player = Player::Defender;
            const std::string name = j.at("name").get<std::string>();
            if (name == "alert-threshold") {
                file.baseline.kind = BaselineKind::AlertThreshold;
                file.baseline.threshold = j.value("threshold", 1);
            } else if (name == "intrusion-oracle") {
                file.baseline.kind = BaselineKind::IntrusionTimeOracle;
            } else {
                throw std::invalid_argument("unknown baseline name '" + name + "'");
            }
            file.baseline.validate();
        } else {
            throw std::invalid_argument("unknown strategy kind '" + kind + "'");
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return file;
}

void save_strategy(const StrategyFile& strategy, const std::string& path) {
    json j;
    switch (strategy.kind) {
        case StrategyKind::Threshold:
        case StrategyKind::Mixed: {
            j["kind"] = strategy.kind == StrategyKind::Mixed ? "mixed" : "threshold";
            j["player"] = player_name(strategy.player);
            j["L"] = strategy.mixture.stops();
            json atoms = json::array();
            for (std::size_t i = 0; i < strategy.mixture.atoms.size(); ++i) {
                json atom;
                atom["theta"] = strategy.mixture.atoms[i].theta;
                atom["weight"] = strategy.mixture.weights[i];
                atoms.push_back(std::move(atom));
            }
            j["atoms"] = std::move(atoms);
            break;
        }
        case StrategyKind::Grid:
            j["kind"] = "grid";
            j["player"] = player_name(strategy.grid.player);
            j["L"] = strategy.grid.L;
            j["grid_points"] = strategy.grid.grid.K;
            j["table"] = strategy.grid.table;
            break;
        case StrategyKind::Baseline:
            j["kind"] = "baseline";
            j["name"] = strategy.baseline.kind == BaselineKind::AlertThreshold
                            ? "alert-threshold"
                            : "intrusion-oracle";
            if (strategy.baseline.kind == BaselineKind::AlertThreshold) {
                j["threshold"] = strategy.baseline.threshold;
            }
            break;
    }
    write_json_file(path, j);
}

void save_mixture(const MixedThresholdStrategy& mixture, const std::string& path) {
    StrategyFile file;
    file.kind = mixture.atoms.size() == 1 ? StrategyKind::Threshold : StrategyKind::Mixed;
    file.player = mixture.player();
    file.mixture = mixture;
    save_strategy(file, path);
}

void save_grid_strategy(const GridStrategy& gs, const std::string& path) {
    StrategyFile file;
    file.kind = StrategyKind::Grid;
    file.player = gs.player;
    file.grid = gs;
    save_strategy(file, path);
}

void save_baseline(const BaselineStrategy& baseline, const std::string& path) {
    StrategyFile file;
    file.kind = StrategyKind::Baseline;
    file.baseline = baseline;
    save_strategy(file, path);
}

std::vector<MetricSamples> load_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::vector<MetricSamples> metrics;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line_no == 1 && line.rfind("metric_name", 0) == 0) continue;  // header
        std::istringstream row(line);
        std::string name, state_str, value_str;
        if (!std::getline(row, name, ',') || !std::getline(row, state_str, ',') ||
            !std::getline(row, value_str)) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": expected metric_name,state,value");
        }
        int state;
        double value;
        try {
            state = std::stoi(state_str);
            value = std::stod(value_str);
        } catch (const std::exception&) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": malformed state or value");
        }
        if (state != 0 && state != 1) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": state must be 0 or 1");
        }
        MetricSamples* bucket = nullptr;
        for (MetricSamples& m : metrics) {
            if (m.metric_name == name) {
                bucket = &m;
                break;
            }
        }
        if (bucket == nullptr) {
            metrics.push_back({name, {}, {}});
            bucket = &metrics.back();
        }
        (state == 0 ? bucket->state0 : bucket->state1).push_back(value);
    }
    if (metrics.empty()) throw std::invalid_argument(path + ": no sample rows");
    return metrics;
}

void write_traces_csv(const std::vector<EpisodeTrace>& traces, const std::string& path) {
    std::ostringstream out;
    out << "episode,t,s,b1,l,a_D,a_A,o,r\n";
    for (std::size_t e = 0; e < traces.size(); ++e) {
        const EpisodeTrace& trace = traces[e];
        for (const EpisodeStep& step : trace.steps) {
            out << e << ',' << step.t << ',' << static_cast<int>(step.s) << ','
                << format_double(step.b1) << ',' << step.l << ','
                << static_cast<int>(step.a_d) << ',' << static_cast<int>(step.a_a) << ','
                << (step.o ? std::to_string(*step.o) : std::string("-1")) << ','
                << format_double(step.r) << '\n';
        }
        out << e << ",end," << to_string(trace.terminal_reason) << ','
            << format_double(trace.discounted_return) << '\n';
    }
    write_text_file(path, out.str());
}

void write_history_csv(const SelfPlayHistory& history, const std::string& path) {
    std::ostringstream out;
    out << "iteration,exploitability,J_D,mean_episode_len,mean_intrusion_len\n";
    for (const SelfPlayRecord& r : history.records) {
        out << r.iteration << ',' << format_double(r.exploitability) << ','
            << format_double(r.j_defender) << ',' << format_double(r.mean_episode_length) << ','
            << format_double(r.mean_intrusion_length) << '\n';
    }
    write_text_file(path, out.str());
}

void write_values_csv(const GridValues& values, const std::string& path) {
    std::ostringstream out;
    if (values.per_state) {
        out << "l,s,b,value\n";
        for (int s = 0; s < 2; ++s) {
            for (int l = 1; l <= values.L; ++l) {
                for (int k = 0; k < values.grid.K; ++k) {
                    out << l << ',' << s << ',' << format_double(values.grid.point(k)) << ','
                        << format_double(values.value(static_cast<State>(s), l, k)) << '\n';
                }
            }
        }
    } else {
        out << "l,b,value\n";
        for (int l = 1; l <= values.L; ++l) {
            for (int k = 0; k < values.grid.K; ++k) {
                out << l << ',' << format_double(values.grid.point(k)) << ','
                    << format_double(values.value(l, k)) << '\n';
            }
        }
    }
    write_text_file(path, out.str());
}

void write_grid_strategy_csv(const GridStrategy& gs, const std::string& path) {
    std::ostringstream out;
    if (gs.player == Player::Defender) {
        out << "l,b,stop_prob\n";
        for (int l = 1; l <= gs.L; ++l) {
            for (int k = 0; k < gs.grid.K; ++k) {
                out << l << ',' << format_double(gs.grid.point(k)) << ','
                    << format_double(gs.value(l, k)) << '\n';
            }
        }
    } else {
        out << "l,s,b,stop_prob\n";
        for (int s = 0; s < 2; ++s) {
            for (int l = 1; l <= gs.L; ++l) {
                for (int k = 0; k < gs.grid.K; ++k) {
                    out << l << ',' << s << ',' << format_double(gs.grid.point(k)) << ','
                        << format_double(gs.value(static_cast<State>(s), l, k)) << '\n';
                }
            }
        }
    }
    write_text_file(path, out.str());
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    json j;
    j["command"] = manifest.command;
    j["seed"] = manifest.seed;
    j["config_paths"] = manifest.config_paths;
    j["outputs"] = manifest.outputs;
    j["started_at"] = manifest.started_at;
    j["version"] = manifest.version;
    write_json_file(path, j);
}

}  // namespace stopgame
