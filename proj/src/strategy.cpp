#include "stopgame/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace stopgame {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p) {
    return std::log(p) - std::log1p(-p);
}

double smooth_threshold(double a, double b) {
    if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("smooth_threshold: b must be in [0,1]");
    if (b <= 0.0) return 0.0;
    if (b >= 1.0) return 1.0;
    // (1 + (b(1-s)/(s(1-b)))^-20)^-1 with s = sigmoid(a); since
    // (1-s)/s = e^-a this is sigmoid(20 * (logit(b) - a)), which is stable
    // for saturated a.
    return sigmoid(20.0 * (logit(b) - a));
}

int ThresholdVector::stops() const {
    const int len = static_cast<int>(theta.size());
    return player == Player::Defender ? len : len / 2;
}

void ThresholdVector::validate() const {
    if (theta.empty()) throw std::invalid_argument("threshold vector must be non-empty");
    if (player == Player::Attacker && theta.size() % 2 != 0) {
        throw std::invalid_argument("attacker threshold vector must have 2L entries");
    }
    for (double v : theta) {
        if (!std::isfinite(v)) throw std::invalid_argument("threshold entries must be finite");
    }
}

namespace {

void check_l(int l, int L) {
    if (l < 1 || l > L) {
        throw std::invalid_argument("l out of range {1.." + std::to_string(L) + "}");
    }
}

}  // namespace

double defender_stop_prob(const ThresholdVector& theta, int l, double b1) {
    if (theta.player != Player::Defender) {
        throw std::invalid_argument("defender_stop_prob needs a defender vector");
    }
    check_l(l, theta.stops());
    return smooth_threshold(theta.theta[static_cast<std::size_t>(l - 1)], b1);
}

double attacker_stop_prob(const ThresholdVector& theta, int l, State s, double d) {
    if (theta.player != Player::Attacker) {
        throw std::invalid_argument("attacker_stop_prob needs an attacker vector");
    }
    const int L = theta.stops();
    check_l(l, L);
    if (!(d >= -1e-9 && d <= 1.0 + 1e-9)) {
        throw std::invalid_argument("defender stop probability out of [0,1]");
    }
    d = std::clamp(d, 0.0, 1.0);
    switch (s) {
        case State::Intrusion:
            return smooth_threshold(theta.theta[static_cast<std::size_t>(L + l - 1)], d);
        case State::NoIntrusion:
            // Complemented so the stop probability in state 0 decreases with
            // the defender's stop probability.
            return 1.0 - smooth_threshold(theta.theta[static_cast<std::size_t>(l - 1)], d);
        case State::Terminal:
            break;
    }
    throw std::invalid_argument("attacker acts only in live states");
}

Player MixedThresholdStrategy::player() const {
    if (atoms.empty()) throw std::invalid_argument("empty mixture");
    return atoms.front().player;
}

int MixedThresholdStrategy::stops() const {
    if (atoms.empty()) throw std::invalid_argument("empty mixture");
    return atoms.front().stops();
}

void MixedThresholdStrategy::validate() const {
    if (atoms.empty()) throw std::invalid_argument("mixture must have at least one atom");
    if (atoms.size() != weights.size()) {
        throw std::invalid_argument("mixture atom/weight count mismatch");
    }
    const Player p = atoms.front().player;
    const std::size_t len = atoms.front().theta.size();
    double sum = 0.0;
    for (const ThresholdVector& atom : atoms) {
        atom.validate();
        if (atom.player != p || atom.theta.size() != len) {
            throw std::invalid_argument("mixture atoms must share player and length");
        }
    }
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("mixture weights must be >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("mixture weights must sum to 1");
}

MixedThresholdStrategy MixedThresholdStrategy::uniform(std::vector<ThresholdVector> atoms) {
    MixedThresholdStrategy mix;
    mix.weights.assign(atoms.size(), atoms.empty() ? 0.0 : 1.0 / atoms.size());
    mix.atoms = std::move(atoms);
    return mix;
}

double MixedThresholdStrategy::defender_prob(int l, double b1) const {
    if (player() != Player::Defender) {
        throw std::invalid_argument("defender_prob on an attacker mixture");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        acc += weights[i] * defender_stop_prob(atoms[i], l, b1);
    }
    // Weight round-off can push the sum a few ulp outside [0,1].
    return std::clamp(acc, 0.0, 1.0);
}

double MixedThresholdStrategy::attacker_prob(int l, State s, double d) const {
    if (player() != Player::Attacker) {
        throw std::invalid_argument("attacker_prob on a defender mixture");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        acc += weights[i] * attacker_stop_prob(atoms[i], l, s, d);
    }
    return std::clamp(acc, 0.0, 1.0);
}

MixedDefenderPolicy::MixedDefenderPolicy(MixedThresholdStrategy mix) : mix_(std::move(mix)) {
    mix_.validate();
    if (mix_.player() != Player::Defender) {
        throw std::invalid_argument("MixedDefenderPolicy needs a defender mixture");
    }
}

double MixedDefenderPolicy::stop_prob(int l, double b1) const {
    return mix_.defender_prob(l, b1);
}

MixedAttackerPolicy::MixedAttackerPolicy(MixedThresholdStrategy mix,
                                         std::shared_ptr<const DefenderPolicy> bound)
    : mix_(std::move(mix)), bound_defender_(std::move(bound)) {
    mix_.validate();
    if (mix_.player() != Player::Attacker) {
        throw std::invalid_argument("MixedAttackerPolicy needs an attacker mixture");
    }
    if (!bound_defender_) {
        throw std::invalid_argument("attacker mixture must be bound to a defender strategy");
    }
}

double MixedAttackerPolicy::stop_prob(int l, double b1, State s) const {
    const double d = bound_defender_->stop_prob(l, b1);
    return mix_.attacker_prob(l, s, d);
}

BeliefGrid::BeliefGrid(int k) : K(k) {
    if (K < 11) throw std::invalid_argument("belief grid needs at least 11 points");
}

BeliefGrid::Interp BeliefGrid::locate(double b1) const {
    if (b1 <= 0.0) return {0, 1.0};
    if (b1 >= 1.0) return {K - 2, 0.0};
    const double x = b1 * (K - 1);
    int lo = static_cast<int>(x);
    if (lo >= K - 1) lo = K - 2;
    return {lo, 1.0 - (x - lo)};
}

GridStrategy GridStrategy::zeros(Player player, int L, BeliefGrid grid) {
    GridStrategy gs;
    gs.player = player;
    gs.grid = grid;
    gs.L = L;
    const std::size_t rows = (player == Player::Defender ? 1u : 2u) * static_cast<std::size_t>(L);
    gs.table.assign(rows * static_cast<std::size_t>(grid.K), 0.0);
    return gs;
}

double& GridStrategy::at(int l, int k) {
    if (player != Player::Defender) throw std::invalid_argument("defender index on attacker table");
    check_l(l, L);
    return table[static_cast<std::size_t>(l - 1) * grid.K + k];
}

double& GridStrategy::at(State s, int l, int k) {
    if (player != Player::Attacker) throw std::invalid_argument("attacker index on defender table");
    check_l(l, L);
    const int si = static_cast<int>(s);
    if (si > 1) throw std::invalid_argument("attacker table is indexed by live states");
    return table[(static_cast<std::size_t>(si) * L + (l - 1)) * grid.K + k];
}

double GridStrategy::value(int l, int k) const { return const_cast<GridStrategy*>(this)->at(l, k); }

double GridStrategy::value(State s, int l, int k) const {
    return const_cast<GridStrategy*>(this)->at(s, l, k);
}

double GridStrategy::prob(int l, double b1) const {
    const BeliefGrid::Interp w = grid.locate(b1);
    return std::clamp(w.w_lo * value(l, w.lo) + (1.0 - w.w_lo) * value(l, w.lo + 1), 0.0, 1.0);
}

double GridStrategy::prob(State s, int l, double b1) const {
    const BeliefGrid::Interp w = grid.locate(b1);
    return std::clamp(w.w_lo * value(s, l, w.lo) + (1.0 - w.w_lo) * value(s, l, w.lo + 1), 0.0,
                      1.0);
}

void GridStrategy::validate() const {
    const std::size_t rows = (player == Player::Defender ? 1u : 2u) * static_cast<std::size_t>(L);
    if (table.size() != rows * static_cast<std::size_t>(grid.K)) {
        throw std::invalid_argument("grid strategy table size mismatch");
    }
    for (double v : table) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("grid strategy entries must be in [0,1]");
        }
    }
}

GridDefenderPolicy::GridDefenderPolicy(GridStrategy gs) : gs_(std::move(gs)) {
    gs_.validate();
    if (gs_.player != Player::Defender) {
        throw std::invalid_argument("GridDefenderPolicy needs a defender table");
    }
}

double GridDefenderPolicy::stop_prob(int l, double b1) const { return gs_.prob(l, b1); }

GridAttackerPolicy::GridAttackerPolicy(GridStrategy gs) : gs_(std::move(gs)) {
    gs_.validate();
    if (gs_.player != Player::Attacker) {
        throw std::invalid_argument("GridAttackerPolicy needs an attacker table");
    }
}

double GridAttackerPolicy::stop_prob(int l, double b1, State s) const {
    return gs_.prob(s, l, b1);
}

void BaselineStrategy::validate() const {
    if (kind == BaselineKind::AlertThreshold && threshold < 1) {
        throw std::invalid_argument("alert threshold must be >= 1");
    }
}

Action baseline_decide(const BaselineStrategy& baseline, const DefenderView& view) {
    switch (baseline.kind) {
        case BaselineKind::AlertThreshold:
            if (view.last_obs.has_value() && *view.last_obs >= baseline.threshold) {
                return Action::Stop;
            }
            return Action::Continue;
        case BaselineKind::IntrusionTimeOracle:
            // Stops while the intrusion is underway and stops remain; a live
            // game always has stops remaining (l >= 1), so the rule reduces
            // to the intrusion-start flag.
            return view.intrusion_started ? Action::Stop : Action::Continue;
    }
    throw std::invalid_argument("unknown baseline kind");
}

BaselineDefenderAgent::BaselineDefenderAgent(BaselineStrategy baseline)
    : baseline_(baseline) {
    baseline_.validate();
}

double BaselineDefenderAgent::stop_prob(const DefenderView& view) const {
    return baseline_decide(baseline_, view) == Action::Stop ? 1.0 : 0.0;
}

}  // namespace stopgame
