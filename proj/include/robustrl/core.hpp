// Tabular robust MDP data model: instances, policies, value tables and the
// validation shared by every other module.
//
// Conventions: states/actions/stages are 0-based in memory; file formats and
// human-readable reports use 1-based indices. A ValueTable holds H+1 stages,
// with the terminal stage identically zero.

#pragma once

#include "robustrl/definitions.hpp"

#include <optional>
#include <sstream>

namespace robustrl {

/// kernel[h][s][a] is a probability row over next states.
using StageKernel = std::vector<std::vector<std::vector<numvec>>>;

/// rewards[h][s][a] in [0, 1].
using StageRewards = std::vector<std::vector<numvec>>;

/// Tabular robust MDP: nominal dynamics plus a robust-set radius.
///
/// The radius is the parameter of the dual-form total-variation operator
/// (see robust_operators.hpp); the adversary may relocate transition mass
/// up to radius/2 per step.
struct RmdpInstance {
    int horizon = 0;     // H >= 1
    int num_states = 0;  // S >= 1
    int num_actions = 0; // A >= 1
    StageKernel kernel;
    StageRewards rewards;
    prec_t robust_radius = 0.0; // in [0, 1)
    int initial_state = 0;
};

/// pi[h][s] is a probability row over actions.
struct PolicyTable {
    std::vector<std::vector<numvec>> pi;
    bool deterministic = false;

    int horizon() const { return static_cast<int>(pi.size()); }

    /// Action with the largest probability (the action itself for point-mass rows).
    int action(int h, int s) const { return static_cast<int>(argmax_index(pi[h][s])); }
};

/// v[h][s] for h = 0..H (stage H is the terminal stage, identically 0).
struct ValueTable {
    std::vector<numvec> v;

    static ValueTable zeros(int horizon, int num_states) {
        ValueTable t;
        t.v.assign(horizon + 1, numvec(num_states, 0.0));
        return t;
    }
};

/// q[h][s][a] for h = 0..H-1.
struct QTable {
    std::vector<std::vector<numvec>> q;

    static QTable zeros(int horizon, int num_states, int num_actions) {
        QTable t;
        t.q.assign(horizon, std::vector<numvec>(num_states, numvec(num_actions, 0.0)));
        return t;
    }
};

enum class RobustOperatorKind { TvDualFull, TvDualVanishing, BoundedRatio };

/// Which robust-expectation operator applies and its parameter:
/// the radius rho in [0,1) for the TV kinds, the ratio parameter
/// rho' in (0,1] for BoundedRatio.
struct RobustOperatorSpec {
    RobustOperatorKind kind = RobustOperatorKind::TvDualFull;
    prec_t parameter = 0.0;

    static RobustOperatorSpec tv_full(prec_t rho) {
        if (rho < 0.0 || rho >= 1.0)
            throw std::invalid_argument("TV robust radius must lie in [0,1)");
        return {RobustOperatorKind::TvDualFull, rho};
    }
    static RobustOperatorSpec tv_vanishing(prec_t rho) {
        if (rho < 0.0 || rho >= 1.0)
            throw std::invalid_argument("TV robust radius must lie in [0,1)");
        return {RobustOperatorKind::TvDualVanishing, rho};
    }
    static RobustOperatorSpec bounded_ratio(prec_t ratio) {
        if (ratio <= 0.0 || ratio > 1.0)
            throw std::invalid_argument("bounded-ratio parameter must lie in (0,1]");
        return {RobustOperatorKind::BoundedRatio, ratio};
    }
};

/// Validation outcome; violations are data, not exceptions.
struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }

    std::string to_string() const {
        if (ok()) return "ok";
        std::ostringstream out;
        for (const auto& v : violations)
            out << v << '\n';
        return out.str();
    }
};

namespace detail {
inline std::string hsa_label(int h, int s, int a) {
    // 1-based in reports
    std::ostringstream out;
    out << "(h=" << h + 1 << ", s=" << s + 1 << ", a=" << a + 1 << ")";
    return out.str();
}
} // namespace detail

/// Checks every structural invariant of an instance: dimensions, row
/// stochasticity within 1e-12, rewards in [0,1], radius in [0,1) and a valid
/// initial state. Violations name the offending entries.
inline ValidationReport validate_instance(const RmdpInstance& inst) {
    ValidationReport report;
    auto fail = [&report](const std::string& msg) { report.violations.push_back(msg); };

    if (inst.horizon < 1) fail("horizon must be >= 1");
    if (inst.num_states < 1) fail("num_states must be >= 1");
    if (inst.num_actions < 1) fail("num_actions must be >= 1");
    if (!(inst.robust_radius >= 0.0 && inst.robust_radius < 1.0))
        fail("robust_radius out of [0,1)");
    if (inst.initial_state < 0 || inst.initial_state >= inst.num_states)
        fail("initial_state is not a valid state index");
    if (!report.ok()) return report;

    const auto H = static_cast<std::size_t>(inst.horizon);
    const auto S = static_cast<std::size_t>(inst.num_states);
    const auto A = static_cast<std::size_t>(inst.num_actions);

    if (inst.kernel.size() != H || inst.rewards.size() != H) {
        fail("kernel/rewards stage count does not match horizon");
        return report;
    }
    for (std::size_t h = 0; h < H; h++) {
        if (inst.kernel[h].size() != S || inst.rewards[h].size() != S) {
            fail("kernel/rewards state count mismatch at stage " + std::to_string(h + 1));
            return report;
        }
        for (std::size_t s = 0; s < S; s++) {
            if (inst.kernel[h][s].size() != A || inst.rewards[h][s].size() != A) {
                fail("kernel/rewards action count mismatch at stage " + std::to_string(h + 1));
                return report;
            }
            for (std::size_t a = 0; a < A; a++) {
                const numvec& row = inst.kernel[h][s][a];
                if (row.size() != S) {
                    fail("kernel row has wrong length at " + detail::hsa_label(h, s, a));
                    continue;
                }
                prec_t sum = 0.0;
                bool nonneg = true;
                for (prec_t x : row) {
                    if (x < 0.0) nonneg = false;
                    sum += x;
                }
                if (!nonneg) fail("kernel row has a negative entry at " + detail::hsa_label(h, s, a));
                if (std::abs(sum - 1.0) > kProbTolerance)
                    fail("kernel row sums to " + std::to_string(sum) + " at " +
                         detail::hsa_label(h, s, a));
                const prec_t r = inst.rewards[h][s][a];
                if (!(r >= 0.0 && r <= 1.0))
                    fail("reward out of [0,1] at " + detail::hsa_label(h, s, a));
            }
        }
    }
    return report;
}

/// Throws when the instance fails validation; used at API boundaries.
inline void require_valid(const RmdpInstance& inst) {
    ValidationReport report = validate_instance(inst);
    if (!report.ok())
        throw std::invalid_argument("invalid instance:\n" + report.to_string());
}

/// Row-stochasticity check for policies, same tolerance as kernels.
inline ValidationReport validate_policy(const PolicyTable& policy, const RmdpInstance& inst) {
    ValidationReport report;
    const auto H = static_cast<std::size_t>(inst.horizon);
    const auto S = static_cast<std::size_t>(inst.num_states);
    const auto A = static_cast<std::size_t>(inst.num_actions);
    if (policy.pi.size() != H) {
        report.violations.push_back("policy stage count does not match horizon");
        return report;
    }
    for (std::size_t h = 0; h < H; h++) {
        if (policy.pi[h].size() != S) {
            report.violations.push_back("policy state count mismatch at stage " +
                                        std::to_string(h + 1));
            return report;
        }
        for (std::size_t s = 0; s < S; s++) {
            const numvec& row = policy.pi[h][s];
            if (row.size() != A) {
                report.violations.push_back("policy row has wrong length at (h=" +
                                            std::to_string(h + 1) + ", s=" + std::to_string(s + 1) +
                                            ")");
                continue;
            }
            if (!is_probability_row(row))
                report.violations.push_back("policy row is not a distribution at (h=" +
                                            std::to_string(h + 1) + ", s=" + std::to_string(s + 1) +
                                            ")");
        }
    }
    return report;
}

/// Every row is the uniform distribution over actions.
inline PolicyTable make_uniform_policy(const RmdpInstance& inst) {
    require_valid(inst);
    PolicyTable policy;
    const prec_t w = 1.0 / static_cast<prec_t>(inst.num_actions);
    policy.pi.assign(inst.horizon,
                     std::vector<numvec>(inst.num_states, numvec(inst.num_actions, w)));
    policy.deterministic = (inst.num_actions == 1);
    return policy;
}

/// Point-mass policy from per-stage, per-state action indices.
inline PolicyTable make_deterministic_policy(const std::vector<std::vector<int>>& actions,
                                             int num_actions) {
    PolicyTable policy;
    policy.pi.reserve(actions.size());
    for (const auto& stage : actions) {
        std::vector<numvec> rows;
        rows.reserve(stage.size());
        for (int a : stage) {
            numvec row(num_actions, 0.0);
            row.at(a) = 1.0;
            rows.push_back(std::move(row));
        }
        policy.pi.push_back(std::move(rows));
    }
    policy.deterministic = true;
    return policy;
}

} // namespace robustrl
