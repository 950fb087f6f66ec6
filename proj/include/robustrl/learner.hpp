// Interactive-data-collection learner: empirical transition estimation,
// variance-aware exploration bonuses, and optimistic/pessimistic robust
// planning driving the episode policy. The learner only ever samples the
// nominal kernel; robustness enters through the dual-form TV operator
// applied to the empirical estimates.

#pragma once

#include "robustrl/core.hpp"
#include "robustrl/planning.hpp"
#include "robustrl/rng.hpp"

namespace robustrl {

/// Bonus constants. `planned_episodes` is the total episode budget K, which
/// enters the log factor and the 1/sqrt(K) additive term. `bonus_scale`
/// multiplies the whole bonus; 1.0 leaves the Bernstein form unscaled.
struct BonusConfig {
    prec_t c1 = 2.0;
    prec_t c2 = 1.0;
    prec_t delta = 0.01;
    long planned_episodes = 1;
    prec_t bonus_scale = 1.0;
};

inline void require_valid(const BonusConfig& config) {
    if (!(config.c1 > 0.0 && config.c2 > 0.0))
        throw std::invalid_argument("bonus constants must be positive");
    if (!(config.delta > 0.0 && config.delta < 1.0))
        throw std::invalid_argument("delta must lie in (0,1)");
    if (config.planned_episodes < 1)
        throw std::invalid_argument("episode budget must be >= 1");
    if (!(config.bonus_scale >= 0.0))
        throw std::invalid_argument("bonus_scale must be nonnegative");
}

/// log(S^3 A H^2 K^{3/2} / delta)
inline prec_t bonus_log_factor(int num_states, int num_actions, int horizon, long episodes,
                               prec_t delta) {
    const prec_t s = static_cast<prec_t>(num_states);
    const prec_t a = static_cast<prec_t>(num_actions);
    const prec_t h = static_cast<prec_t>(horizon);
    const prec_t k = static_cast<prec_t>(episodes);
    return std::log(s * s * s * a * h * h * std::pow(k, 1.5) / delta);
}

struct Trajectory {
    struct Step {
        int state = 0;
        int action = 0;
        prec_t reward = 0.0;
        int next_state = 0;
    };
    std::vector<Step> steps;
};

/// Mutable learner state: visit counts, the empirical kernel (all-zero rows
/// until first visit), the optimistic/pessimistic tables of the latest
/// planning pass and the greedy episode policy. Owned by exactly one run.
struct LearnerState {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    prec_t robust_radius = 0.0;
    BonusConfig config;
    prec_t iota = 0.0;
    prec_t value_clamp = 0.0; // min{H, 1/rho}

    std::vector<std::vector<std::vector<std::vector<long>>>> counts; // [h][s][a][s']
    std::vector<std::vector<std::vector<long>>> counts_sa;           // [h][s][a]
    StageKernel p_hat;

    QTable q_upper, q_lower;
    ValueTable v_upper, v_lower;
    std::vector<std::vector<int>> greedy; // [h][s], the episode policy
    long episode = 0;                     // completed episodes
};

inline LearnerState make_learner_state(const RmdpInstance& inst, const BonusConfig& config) {
    require_valid(inst);
    require_valid(config);
    const int H = inst.horizon, S = inst.num_states, A = inst.num_actions;

    LearnerState st;
    st.horizon = H;
    st.num_states = S;
    st.num_actions = A;
    st.robust_radius = inst.robust_radius;
    st.config = config;
    st.iota = bonus_log_factor(S, A, H, config.planned_episodes, config.delta);
    st.value_clamp = inst.robust_radius > 0.0
                         ? std::min<prec_t>(H, 1.0 / inst.robust_radius)
                         : static_cast<prec_t>(H);
    st.counts.assign(
        H, std::vector<std::vector<std::vector<long>>>(
               S, std::vector<std::vector<long>>(A, std::vector<long>(S, 0))));
    st.counts_sa.assign(H, std::vector<std::vector<long>>(S, std::vector<long>(A, 0)));
    st.p_hat.assign(H, std::vector<std::vector<numvec>>(S, std::vector<numvec>(A, numvec(S, 0.0))));
    st.q_upper = QTable::zeros(H, S, A);
    st.q_lower = QTable::zeros(H, S, A);
    st.v_upper = ValueTable::zeros(H, S);
    st.v_lower = ValueTable::zeros(H, S);
    st.greedy.assign(H, std::vector<int>(S, 0));
    return st;
}

/// Bernstein-style bonus
///
///   sqrt( Var_{P^(.|s,a)}[(Vu + Vl)/2] * c1 * iota / (N v 1) )
///   + (2/H) * E_{P^}[Vu - Vl] + c2 H^2 S iota / (N v 1) + 1/sqrt(K),
///
/// evaluated on the empirical kernel row; all expectation terms vanish on
/// unvisited rows by the all-zero convention. Scaled by bonus_scale.
inline prec_t compute_bonus(const LearnerState& st, int h, int s, int a) {
    const numvec& row = st.p_hat[h][s][a];
    const numvec& vu = st.v_upper.v[h + 1];
    const numvec& vl = st.v_lower.v[h + 1];
    const prec_t n = static_cast<prec_t>(std::max<long>(st.counts_sa[h][s][a], 1));
    const prec_t big_h = static_cast<prec_t>(st.horizon);
    const prec_t big_s = static_cast<prec_t>(st.num_states);

    prec_t mean_mid = 0.0, mean_mid_sq = 0.0, mean_gap = 0.0;
    for (int next = 0; next < st.num_states; next++) {
        const prec_t mid = 0.5 * (vu[next] + vl[next]);
        mean_mid += row[next] * mid;
        mean_mid_sq += row[next] * mid * mid;
        mean_gap += row[next] * (vu[next] - vl[next]);
    }
    const prec_t variance = std::max(mean_mid_sq - mean_mid * mean_mid, prec_t(0.0));

    const prec_t bonus = std::sqrt(variance * st.config.c1 * st.iota / n) +
                         2.0 * mean_gap / big_h +
                         st.config.c2 * big_h * big_h * big_s * st.iota / n +
                         1.0 / std::sqrt(static_cast<prec_t>(st.config.planned_episodes));
    return st.config.bonus_scale * bonus;
}

/// One backward planning pass, h = H..1:
///   Qu = min{ R + robust expectation of Vu_{h+1} + bonus, min{H, 1/rho} },
///   Ql = max{ R + robust expectation of Vl_{h+1} - bonus, 0 },
/// greedy argmax of Qu (smallest index on ties) defines the episode policy
/// and both value tables. The robust expectation is the vanishing-minimum
/// dual form on the empirical row.
inline void optimistic_robust_planning(LearnerState& st, const RmdpInstance& inst) {
    const int H = st.horizon, S = st.num_states, A = st.num_actions;
    const prec_t bound = static_cast<prec_t>(H);
    const prec_t rho = st.robust_radius;

    for (int h = H - 1; h >= 0; h--) {
        const numvec& vu_next = st.v_upper.v[h + 1];
        const numvec& vl_next = st.v_lower.v[h + 1];
        const sizvec asc_u = sort_indices(vu_next);
        const sizvec asc_l = sort_indices(vl_next);
        for (int s = 0; s < S; s++) {
            numvec& qu = st.q_upper.q[h][s];
            numvec& ql = st.q_lower.q[h][s];
            for (int a = 0; a < A; a++) {
                const numvec& row = st.p_hat[h][s][a];
                const prec_t bonus = compute_bonus(st, h, s, a);
                const prec_t upper_mid = tv_dual_vanishing_value(vu_next, row, asc_u, rho, bound);
                const prec_t lower_mid = tv_dual_vanishing_value(vl_next, row, asc_l, rho, bound);
                qu[a] = std::min(inst.rewards[h][s][a] + upper_mid + bonus, st.value_clamp);
                ql[a] = std::max(inst.rewards[h][s][a] + lower_mid - bonus, prec_t(0.0));
            }
            const int best = static_cast<int>(argmax_index(qu));
            st.greedy[h][s] = best;
            st.v_upper.v[h][s] = qu[best];
            st.v_lower.v[h][s] = ql[best];
        }
    }
}

/// Executes the greedy policy for one episode against the nominal kernel,
/// appending every transition to the counts and refreshing the touched
/// empirical rows.
inline Trajectory run_episode(LearnerState& st, const RmdpInstance& inst, Rng& rng) {
    Trajectory traj;
    traj.steps.reserve(st.horizon);
    int s = inst.initial_state;
    for (int h = 0; h < st.horizon; h++) {
        const int a = st.greedy[h][s];
        const int next = static_cast<int>(rng.sample_row(inst.kernel[h][s][a]));
        traj.steps.push_back({s, a, inst.rewards[h][s][a], next});

        st.counts[h][s][a][next]++;
        st.counts_sa[h][s][a]++;
        const prec_t n = static_cast<prec_t>(st.counts_sa[h][s][a]);
        numvec& row = st.p_hat[h][s][a];
        for (int i = 0; i < st.num_states; i++)
            row[i] = static_cast<prec_t>(st.counts[h][s][a][i]) / n;

        s = next;
    }
    st.episode++;
    return traj;
}

struct EpisodeRecord {
    Trajectory trajectory;
    prec_t upper_root = 0.0; // optimistic value at the initial state
    prec_t lower_root = 0.0; // pessimistic value at the initial state
};

struct RunResult {
    std::vector<std::vector<std::vector<int>>> policies; // [k][h][s]
    std::vector<EpisodeRecord> history;
    std::size_t output_policy_index = 0;
    PolicyTable output_policy;
};

/// Full estimation -> planning -> execution loop for `episodes` rounds; the
/// output policy is drawn uniformly from the executed policies with the
/// run's generator. Everything is determined by (instance, config, episodes,
/// seed).
inline RunResult run(const RmdpInstance& inst, const BonusConfig& config_in, long episodes,
                     std::uint64_t seed) {
    BonusConfig config = config_in;
    config.planned_episodes = episodes;
    LearnerState st = make_learner_state(inst, config);
    Rng rng(seed);

    RunResult result;
    result.policies.reserve(episodes);
    result.history.reserve(episodes);
    for (long k = 0; k < episodes; k++) {
        optimistic_robust_planning(st, inst);
        EpisodeRecord record;
        record.upper_root = st.v_upper.v[0][inst.initial_state];
        record.lower_root = st.v_lower.v[0][inst.initial_state];
        record.trajectory = run_episode(st, inst, rng);
        result.policies.push_back(st.greedy);
        result.history.push_back(std::move(record));
    }
    result.output_policy_index = rng.uniform_index(static_cast<std::size_t>(episodes));
    result.output_policy =
        make_deterministic_policy(result.policies[result.output_policy_index], inst.num_actions);
    return result;
}

} // namespace robustrl
