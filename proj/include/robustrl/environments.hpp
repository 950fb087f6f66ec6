// Instance generators and transformations: the two-state support-shift
// instance family, fail-state augmentation, seeded random instances, and the
// finite-horizon reduction of discounted ratio-bounded robust MDPs.

#pragma once

#include "robustrl/core.hpp"
#include "robustrl/rng.hpp"

namespace robustrl {

/// Parameters of the two-state hard instance family. `theta` selects which
/// action at the bad state carries the higher escape probability `p` (the
/// other carries `q`); `rho` is the transition mass the adversary may
/// relocate, so the generated instance stores robust_radius = 2 * rho;
/// `blocks` concatenates copies of the three-step pattern.
struct HardInstanceParams {
    int theta = 0;
    prec_t p = 0.8;
    prec_t q = 0.4;
    prec_t rho = 0.2;
    int blocks = 1;
};

constexpr int kHardGoodState = 0;
constexpr int kHardBadState = 1;

/// Builds the hard instance: S=2, A=2, H=3*blocks, reward 1 at the good
/// state and 0 at the bad state, the good state absorbing under the nominal
/// kernel. At the second step of each block the bad state escapes to the good
/// state with probability p (action theta) or q (the other action). In
/// multi-block instances the first step of every block after the first is a
/// reset: reward 1 at the bad state and a deterministic transition to the
/// good state. Bad-state rows at the remaining steps reuse the escape row,
/// which is unreachable under the nominal kernel from the good initial state.
inline RmdpInstance make_hard_instance(const HardInstanceParams& params) {
    if (!(0.0 < params.q && params.q < params.p && params.p < 1.0))
        throw std::invalid_argument("hard instance requires 0 < q < p < 1");
    if (!(params.rho >= 0.0 && params.rho <= params.q))
        throw std::invalid_argument("hard instance requires rho in [0, q]");
    if (2.0 * params.rho >= 1.0)
        throw std::invalid_argument("hard instance requires rho < 1/2");
    if (params.theta != 0 && params.theta != 1)
        throw std::invalid_argument("theta must be 0 or 1");
    if (params.blocks < 1) throw std::invalid_argument("blocks must be >= 1");

    const int H = 3 * params.blocks;
    RmdpInstance inst;
    inst.horizon = H;
    inst.num_states = 2;
    inst.num_actions = 2;
    inst.robust_radius = 2.0 * params.rho;
    inst.initial_state = kHardGoodState;
    inst.kernel.assign(H, std::vector<std::vector<numvec>>(2, std::vector<numvec>(2)));
    inst.rewards.assign(H, std::vector<numvec>(2, numvec(2, 0.0)));

    numvec escape_theta = {0.0, 0.0};
    escape_theta[kHardGoodState] = params.p;
    escape_theta[kHardBadState] = 1.0 - params.p;
    numvec escape_other = {0.0, 0.0};
    escape_other[kHardGoodState] = params.q;
    escape_other[kHardBadState] = 1.0 - params.q;

    const numvec stay_good = {1.0, 0.0};

    for (int h = 0; h < H; h++) {
        const bool reset_step = (h % 3 == 0) && h > 0;
        for (int a = 0; a < 2; a++) {
            inst.rewards[h][kHardGoodState][a] = 1.0;
            inst.rewards[h][kHardBadState][a] = reset_step ? 1.0 : 0.0;
            inst.kernel[h][kHardGoodState][a] = stay_good;
            if (reset_step) {
                inst.kernel[h][kHardBadState][a] = stay_good;
            } else {
                inst.kernel[h][kHardBadState][a] =
                    (a == params.theta) ? escape_theta : escape_other;
            }
        }
    }
    return inst;
}

/// Adds one absorbing zero-reward state (appended as the last index);
/// original transitions are unchanged.
inline RmdpInstance augment_with_fail_state(const RmdpInstance& inst) {
    require_valid(inst);
    RmdpInstance out = inst;
    const int fail = inst.num_states;
    out.num_states = inst.num_states + 1;
    for (int h = 0; h < inst.horizon; h++) {
        for (auto& state_rows : out.kernel[h])
            for (auto& row : state_rows)
                row.push_back(0.0);
        numvec fail_row(out.num_states, 0.0);
        fail_row[fail] = 1.0;
        out.kernel[h].emplace_back(inst.num_actions, fail_row);
        out.rewards[h].emplace_back(numvec(inst.num_actions, 0.0));
    }
    return out;
}

/// Seeded random instance: kernel rows from a symmetric Dirichlet(1),
/// rewards uniform in [0,1], initial state 0. With `require_vanishing_min`
/// the result is fail-state augmented, which forces a zero-value state.
/// `sparsity` in [0,1) drops entries before normalization (at least one
/// entry always survives).
inline RmdpInstance make_random_instance(std::uint64_t seed, int num_states, int num_actions,
                                         int horizon, prec_t rho, bool require_vanishing_min,
                                         prec_t sparsity = 0.0) {
    if (num_states < 1 || num_actions < 1 || horizon < 1)
        throw std::invalid_argument("S, A, H must all be >= 1");
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0,1)");
    if (!(sparsity >= 0.0 && sparsity < 1.0))
        throw std::invalid_argument("sparsity must lie in [0,1)");

    Rng rng(seed);
    RmdpInstance inst;
    inst.horizon = horizon;
    inst.num_states = num_states;
    inst.num_actions = num_actions;
    inst.robust_radius = rho;
    inst.initial_state = 0;
    inst.kernel.assign(horizon,
                       std::vector<std::vector<numvec>>(num_states, std::vector<numvec>(num_actions)));
    inst.rewards.assign(horizon, std::vector<numvec>(num_states, numvec(num_actions, 0.0)));

    for (int h = 0; h < horizon; h++) {
        for (int s = 0; s < num_states; s++) {
            for (int a = 0; a < num_actions; a++) {
                numvec row(num_states);
                for (auto& x : row)
                    x = rng.exponential();
                if (sparsity > 0.0) {
                    const std::size_t keep = argmax_index(row);
                    for (std::size_t i = 0; i < row.size(); i++)
                        if (i != keep && rng.uniform() < sparsity) row[i] = 0.0;
                }
                const prec_t sum = std::accumulate(row.cbegin(), row.cend(), prec_t(0.0));
                for (auto& x : row)
                    x /= sum;
                inst.kernel[h][s][a] = std::move(row);
                inst.rewards[h][s][a] = rng.uniform();
            }
        }
    }
    if (require_vanishing_min) return augment_with_fail_state(inst);
    return inst;
}

/// Finite-horizon discounted robust MDP with a ratio-bounded robust set:
/// stage rewards gamma^{h-1} * R_h and worst case over distributions with
/// density ratio at most 1/rho_prime against the nominal row.
struct DiscountedInstance {
    RmdpInstance base; // rewards hold the undiscounted R_h
    prec_t gamma = 1.0;
    prec_t rho_prime = 1.0;
};

inline void require_valid(const DiscountedInstance& d) {
    require_valid(d.base);
    if (!(d.rho_prime > 0.5 && d.rho_prime <= 1.0))
        throw std::invalid_argument("rho_prime must lie in (1/2, 1]");
    if (!(d.gamma > 0.0 && d.gamma <= 1.0))
        throw std::invalid_argument("gamma must lie in (0, 1]");
    if (d.gamma > d.rho_prime)
        throw std::invalid_argument("gamma must not exceed rho_prime");
}

/// The discounted instance with its rewards materialized (gamma^{h-1} R_h),
/// ready for planning under the BoundedRatio operator.
inline RmdpInstance discounted_reward_instance(const DiscountedInstance& d) {
    require_valid(d);
    RmdpInstance out = d.base;
    out.robust_radius = 2.0 - 2.0 * d.rho_prime;
    prec_t factor = 1.0;
    for (int h = 0; h < out.horizon; h++) {
        for (auto& state_rewards : out.rewards[h])
            for (auto& r : state_rewards)
                r *= factor;
        factor *= d.gamma;
    }
    return out;
}

/// Equivalent TV-form instance: one absorbing zero-reward state appended,
/// rewards scaled to (gamma/rho_prime)^{h-1} * R_h, robust radius
/// 2 - 2*rho_prime. Planning it with the TV operator and scaling stage-h
/// values by rho_prime^{h-1} reproduces the ratio-bounded discounted values.
inline RmdpInstance to_auxiliary_tv(const DiscountedInstance& d) {
    require_valid(d);
    RmdpInstance scaled = d.base;
    const prec_t ratio = d.gamma / d.rho_prime;
    prec_t factor = 1.0;
    for (int h = 0; h < scaled.horizon; h++) {
        for (auto& state_rewards : scaled.rewards[h])
            for (auto& r : state_rewards)
                r *= factor;
        factor *= ratio;
    }
    RmdpInstance out = augment_with_fail_state(scaled);
    out.robust_radius = 2.0 - 2.0 * d.rho_prime;
    return out;
}

/// States with positive reach probability per stage under the nominal kernel,
/// starting from the initial state. reachable[h][s] for h = 0..H.
inline std::vector<std::vector<bool>> reachable_states_per_stage(const RmdpInstance& inst) {
    std::vector<std::vector<bool>> reach(inst.horizon + 1,
                                         std::vector<bool>(inst.num_states, false));
    reach[0][inst.initial_state] = true;
    for (int h = 0; h < inst.horizon; h++) {
        for (int s = 0; s < inst.num_states; s++) {
            if (!reach[h][s]) continue;
            for (int a = 0; a < inst.num_actions; a++)
                for (int next = 0; next < inst.num_states; next++)
                    if (inst.kernel[h][s][a][next] > 0.0) reach[h + 1][next] = true;
        }
    }
    return reach;
}

} // namespace robustrl
