#pragma once

#include <memory>
#include <vector>

#include "stopgame/policy.hpp"

namespace stopgame {

// Smoothed step function used by the threshold parameterization:
//   phi(a, b) = (1 + (b(1-sigma(a)) / (sigma(a)(1-b)))^-20)^-1
// which reduces to sigmoid(20 * (logit(b) - a)). sigma(a) is the soft
// threshold: the result crosses 1/2 exactly at b = sigma(a). The limits
// b -> 0 and b -> 1 map to 0 and 1 exactly.
double smooth_threshold(double a, double b);

double sigmoid(double x);
double logit(double p);

// Threshold parameter vector: length L for the defender, 2L for the attacker
// (attacker entries are indexed state-major: theta[s*L + l - 1]).
struct ThresholdVector {
    Player player = Player::Defender;
    std::vector<double> theta;

    int stops() const;  // L implied by player and length
    void validate() const;
};

// Stop probability of a defender threshold vector at (l, b1).
double defender_stop_prob(const ThresholdVector& theta, int l, double b1);

// Stop probability of an attacker threshold vector at (l, s) given the
// defender's current stop probability d. For s=1 the probability increases
// with d; for s=0 the complement is used so it decreases with d.
double attacker_stop_prob(const ThresholdVector& theta, int l, State s, double d);

// Weighted collection of threshold vectors; the self-play average strategy.
struct MixedThresholdStrategy {
    std::vector<ThresholdVector> atoms;
    std::vector<double> weights;  // sum to 1; uniform by default

    Player player() const;
    int stops() const;
    void validate() const;

    static MixedThresholdStrategy uniform(std::vector<ThresholdVector> atoms);

    // Behavioral average of the atoms' stop probabilities.
    double defender_prob(int l, double b1) const;
    double attacker_prob(int l, State s, double d) const;
};

class MixedDefenderPolicy final : public DefenderPolicy {
public:
    explicit MixedDefenderPolicy(MixedThresholdStrategy mix);
    double stop_prob(int l, double b1) const override;
    const MixedThresholdStrategy& mixture() const { return mix_; }

private:
    MixedThresholdStrategy mix_;
};

// An attacker mixture is evaluable only once bound to a defender strategy:
// its thresholds live in defender-stop-probability space.
class MixedAttackerPolicy final : public AttackerPolicy {
public:
    MixedAttackerPolicy(MixedThresholdStrategy mix, std::shared_ptr<const DefenderPolicy> bound);
    double stop_prob(int l, double b1, State s) const override;
    const MixedThresholdStrategy& mixture() const { return mix_; }

private:
    MixedThresholdStrategy mix_;
    std::shared_ptr<const DefenderPolicy> bound_defender_;
};

// Uniform belief grid {0, 1/(K-1), ..., 1}; K >= 11.
struct BeliefGrid {
    int K = 201;

    explicit BeliefGrid(int k);
    double point(int idx) const { return static_cast<double>(idx) / (K - 1); }
    // Linear interpolation weights for querying a tabulated function at b1.
    struct Interp {
        int lo = 0;
        double w_lo = 1.0;  // value = w_lo * f[lo] + (1 - w_lo) * f[lo + 1]
    };
    Interp locate(double b1) const;
};

// Tabular stop probabilities over (l, grid) for the defender and
// (s, l, grid) for the attacker; the oracle's strategy representation.
struct GridStrategy {
    Player player = Player::Defender;
    BeliefGrid grid{201};
    int L = 1;
    // defender: table[(l-1)*K + k]; attacker: table[((s*L)+(l-1))*K + k]
    std::vector<double> table;

    static GridStrategy zeros(Player player, int L, BeliefGrid grid);

    double& at(int l, int k);
    double& at(State s, int l, int k);
    double value(int l, int k) const;
    double value(State s, int l, int k) const;

    // Linear interpolation between the neighboring grid points of b1.
    double prob(int l, double b1) const;
    double prob(State s, int l, double b1) const;

    void validate() const;
};

class GridDefenderPolicy final : public DefenderPolicy {
public:
    explicit GridDefenderPolicy(GridStrategy gs);
    double stop_prob(int l, double b1) const override;
    const GridStrategy& strategy() const { return gs_; }

private:
    GridStrategy gs_;
};

class GridAttackerPolicy final : public AttackerPolicy {
public:
    explicit GridAttackerPolicy(GridStrategy gs);
    double stop_prob(int l, double b1, State s) const override;
    const GridStrategy& strategy() const { return gs_; }

private:
    GridStrategy gs_;
};

// Static defender baselines.
enum class BaselineKind {
    AlertThreshold,      // stop iff the last observation >= threshold
    IntrusionTimeOracle, // performs all L stops once the intrusion has started
};

struct BaselineStrategy {
    BaselineKind kind = BaselineKind::AlertThreshold;
    int threshold = 1;  // AlertThreshold only; >= 1

    void validate() const;
};

Action baseline_decide(const BaselineStrategy& baseline, const DefenderView& view);

class BaselineDefenderAgent final : public DefenderAgent {
public:
    explicit BaselineDefenderAgent(BaselineStrategy baseline);
    double stop_prob(const DefenderView& view) const override;
    const BaselineStrategy& strategy() const { return baseline_; }

private:
    BaselineStrategy baseline_;
};

}  // namespace stopgame
