// Experiment orchestration: exact regret curves, the support-shift hardness
// demonstration, radius sweeps, and the randomized invariant check suite.
// Policies executed by the learner are scored by exact robust planning, so
// the reported regret carries no Monte-Carlo estimation noise.

#pragma once

#include "robustrl/environments.hpp"
#include "robustrl/io.hpp"
#include "robustrl/learner.hpp"
#include "robustrl/planning.hpp"

#include <array>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <thread>

namespace robustrl {

// ---------------------------------------------------------------------------
// worker pool
// ---------------------------------------------------------------------------

/// Parallelism cap: ROBUSTRL_WORKERS when set, otherwise the logical core
/// count.
inline std::size_t worker_limit() {
    if (const char* env = std::getenv("ROBUSTRL_WORKERS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<std::size_t>(n);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

/// Runs fn(0..count-1) on a bounded pool; each index owns its output slot,
/// so no synchronization beyond the work queue is needed.
template <typename Fn> inline void parallel_over_indices(std::size_t count, Fn&& fn) {
    const std::size_t workers = std::min(worker_limit(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; i++)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; w++) {
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                fn(i);
        });
    }
    for (auto& t : pool)
        t.join();
}

// ---------------------------------------------------------------------------
// regret experiments
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    RmdpInstance instance;
    BonusConfig bonus;
    long episodes = 1;
    std::vector<std::uint64_t> seeds;
    /// Replaces the learner with the fixed optimal robust policy; the regret
    /// curve is then identically zero (harness self-test).
    bool oracle_policy_mode = false;
    /// When nonempty, per-seed CSVs and a summary document are written here.
    std::string output_dir;
};

inline void require_valid(const ExperimentConfig& config) {
    if (config.episodes < 1) throw std::invalid_argument("episode budget must be >= 1");
    if (config.seeds.empty()) throw std::invalid_argument("at least one seed is required");
    require_valid(config.instance);
    BonusConfig bonus = config.bonus;
    bonus.planned_episodes = config.episodes;
    require_valid(bonus);
}

inline std::uint64_t config_hash(const ExperimentConfig& config) {
    std::string canonical = instance_to_json(config.instance).dump();
    canonical += "|c1=" + format_number(config.bonus.c1);
    canonical += "|c2=" + format_number(config.bonus.c2);
    canonical += "|delta=" + format_number(config.bonus.delta);
    canonical += "|bonus_scale=" + format_number(config.bonus.bonus_scale);
    canonical += "|K=" + std::to_string(config.episodes);
    canonical += "|oracle=" + std::to_string(config.oracle_policy_mode ? 1 : 0);
    for (auto s : config.seeds)
        canonical += "|seed=" + std::to_string(s);
    return fnv1a_hash(canonical);
}

struct EpisodeStat {
    long k = 0; // 1-based episode index
    prec_t policy_value = 0.0;
    prec_t instant_regret = 0.0;
    prec_t cumulative_regret = 0.0;
    bool sandwich_ok = true;
};

struct SeedResult {
    std::uint64_t seed = 0;
    std::vector<EpisodeStat> episodes;
    prec_t final_regret = 0.0;
    PolicyTable output_policy; // uniformly drawn from the executed policies
};

struct ExperimentSummary {
    prec_t optimal_value = 0.0;
    prec_t final_regret_mean = 0.0;
    prec_t final_regret_stddev = 0.0;
    /// (episode count, across-seed mean cumulative regret) at the dyadic
    /// checkpoints 2^10..2^15 clipped to the budget.
    std::vector<std::pair<long, prec_t>> dyadic_mean_regret;
    prec_t loglog_slope = 0.0;
    bool slope_valid = false;
    prec_t sandwich_rate = 1.0;
};

struct ExperimentResult {
    std::uint64_t config_hash = 0;
    std::uint64_t instance_hash = 0;
    BonusConfig bonus;
    long episodes = 0;
    std::vector<SeedResult> per_seed;
    ExperimentSummary summary;
};

/// Least-squares slope of log(y) against log(x).
inline prec_t fit_loglog_slope(const std::vector<std::pair<long, prec_t>>& points) {
    prec_t sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (const auto& [x, y] : points) {
        if (x <= 0 || y <= 0.0) continue;
        const prec_t lx = std::log(static_cast<prec_t>(x));
        const prec_t ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        n++;
    }
    if (n < 2) return std::numeric_limits<prec_t>::quiet_NaN();
    const prec_t denom = static_cast<prec_t>(n) * sxx - sx * sx;
    return (static_cast<prec_t>(n) * sxy - sx * sy) / denom;
}

inline std::vector<long> dyadic_checkpoints(long episodes) {
    std::vector<long> ks;
    for (long k = 1L << 10; k <= (1L << 15); k <<= 1)
        if (k <= episodes) ks.push_back(k);
    return ks;
}

namespace detail {

inline SeedResult score_single_seed(const ExperimentConfig& config, const PlanningResult& optimum,
                                    std::uint64_t seed) {
    const prec_t v_opt = optimum.v_star.v[0][config.instance.initial_state];
    const RobustOperatorSpec op = optimum.op;

    SeedResult result;
    result.seed = seed;
    result.episodes.reserve(config.episodes);
    prec_t cumulative = 0.0;

    if (config.oracle_policy_mode) {
        for (long k = 1; k <= config.episodes; k++)
            result.episodes.push_back({k, v_opt, 0.0, 0.0, true});
        result.final_regret = 0.0;
        return result;
    }

    RunResult run_result = run(config.instance, config.bonus, config.episodes, seed);
    result.output_policy = run_result.output_policy;
    for (long k = 0; k < config.episodes; k++) {
        const PolicyTable policy =
            make_deterministic_policy(run_result.policies[k], config.instance.num_actions);
        auto [values, qvalues] = robust_policy_evaluation(config.instance, op, policy);
        const prec_t v_pi = values.v[0][config.instance.initial_state];
        const prec_t instant = v_opt - v_pi;
        cumulative += instant;

        constexpr prec_t tol = 1e-9;
        const EpisodeRecord& rec = run_result.history[k];
        const bool sandwich = rec.lower_root <= v_pi + tol && v_pi <= v_opt + tol &&
                              v_opt <= rec.upper_root + tol;
        result.episodes.push_back({k + 1, v_pi, instant, cumulative, sandwich});
    }
    result.final_regret = cumulative;
    return result;
}

inline void write_seed_csv(const std::string& path, const ExperimentResult& result,
                           const SeedResult& seed_result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(result.config_hash));
    out << "# config_hash=" << hash_buf << '\n';
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(result.instance_hash));
    out << "# instance_hash=" << hash_buf << '\n';
    out << "# K=" << result.episodes << " c1=" << format_number(result.bonus.c1)
        << " c2=" << format_number(result.bonus.c2)
        << " delta=" << format_number(result.bonus.delta)
        << " bonus_scale=" << format_number(result.bonus.bonus_scale) << '\n';
    out << "# seed=" << seed_result.seed << '\n';
    out << "k,robust_value_of_pi_k,instantaneous_regret,cumulative_regret,sandwich_ok\n";
    for (const auto& row : seed_result.episodes) {
        out << row.k << ',' << format_number(row.policy_value) << ','
            << format_number(row.instant_regret) << ',' << format_number(row.cumulative_regret)
            << ',' << (row.sandwich_ok ? 1 : 0) << '\n';
    }
}

} // namespace detail

/// Runs the learner for every configured seed (fanned out over the worker
/// pool), scores each executed policy exactly, and aggregates the summary.
inline ExperimentResult regret_experiment(const ExperimentConfig& config) {
    require_valid(config);
    const PlanningResult optimum =
        robust_value_iteration(config.instance,
                               RobustOperatorSpec::tv_full(config.instance.robust_radius));
    const prec_t v_opt = optimum.v_star.v[0][config.instance.initial_state];

    ExperimentResult result;
    result.config_hash = config_hash(config);
    result.instance_hash = instance_hash(config.instance);
    result.bonus = config.bonus;
    result.bonus.planned_episodes = config.episodes;
    result.episodes = config.episodes;
    result.per_seed.resize(config.seeds.size());

    parallel_over_indices(config.seeds.size(), [&](std::size_t i) {
        result.per_seed[i] = detail::score_single_seed(config, optimum, config.seeds[i]);
    });

    // summary (single-threaded merge, seed order)
    ExperimentSummary& summary = result.summary;
    summary.optimal_value = v_opt;
    prec_t sum = 0.0, sum_sq = 0.0;
    long sandwich_hits = 0, sandwich_total = 0;
    for (const auto& seed_result : result.per_seed) {
        sum += seed_result.final_regret;
        sum_sq += seed_result.final_regret * seed_result.final_regret;
        for (const auto& row : seed_result.episodes) {
            sandwich_hits += row.sandwich_ok ? 1 : 0;
            sandwich_total++;
        }
    }
    const prec_t n_seeds = static_cast<prec_t>(result.per_seed.size());
    summary.final_regret_mean = sum / n_seeds;
    summary.final_regret_stddev =
        result.per_seed.size() > 1
            ? std::sqrt(std::max(prec_t(0.0), (sum_sq - sum * sum / n_seeds) / (n_seeds - 1)))
            : 0.0;
    summary.sandwich_rate =
        sandwich_total > 0 ? static_cast<prec_t>(sandwich_hits) / sandwich_total : 1.0;

    for (long k : dyadic_checkpoints(config.episodes)) {
        prec_t mean = 0.0;
        for (const auto& seed_result : result.per_seed)
            mean += seed_result.episodes[k - 1].cumulative_regret;
        summary.dyadic_mean_regret.emplace_back(k, mean / n_seeds);
    }
    summary.loglog_slope = fit_loglog_slope(summary.dyadic_mean_regret);
    summary.slope_valid = !std::isnan(summary.loglog_slope);

    if (!config.output_dir.empty()) {
        std::filesystem::create_directories(config.output_dir);
        for (const auto& seed_result : result.per_seed) {
            detail::write_seed_csv(config.output_dir + "/regret_seed" +
                                       std::to_string(seed_result.seed) + ".csv",
                                   result, seed_result);
        }
        json summary_doc;
        char hash_buf[32];
        std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                      static_cast<unsigned long long>(result.config_hash));
        summary_doc["config_hash"] = hash_buf;
        summary_doc["optimal_value"] = summary.optimal_value;
        summary_doc["final_regret_mean"] = summary.final_regret_mean;
        summary_doc["final_regret_stddev"] = summary.final_regret_stddev;
        summary_doc["sandwich_rate"] = summary.sandwich_rate;
        summary_doc["loglog_slope"] = summary.slope_valid ? json(summary.loglog_slope) : json();
        summary_doc["constants"] = {{"c1", result.bonus.c1},
                                    {"c2", result.bonus.c2},
                                    {"delta", result.bonus.delta},
                                    {"bonus_scale", result.bonus.bonus_scale}};
        json seeds = json::array();
        for (const auto& seed_result : result.per_seed)
            seeds.push_back(seed_result.seed);
        summary_doc["seeds"] = seeds;
        std::ofstream out(config.output_dir + "/summary.json");
        out << summary_doc.dump(2) << '\n';
    }
    return result;
}

// ---------------------------------------------------------------------------
// hardness demonstration
// ---------------------------------------------------------------------------

struct HardnessReport {
    std::array<prec_t, 2> mean_regret = {0.0, 0.0}; // indexed by theta
    prec_t max_regret = 0.0;
    prec_t floor = 0.0; // 0.5 * (p - q) * rho * K
    bool passed = false;
    std::array<std::vector<prec_t>, 2> per_seed_regret;
};

/// Runs the learner on both orientations of the two-state hard instance with
/// identical seeds; the uninformed choice at the unobservable decision point
/// makes one orientation suffer linear regret, which the report checks
/// against the (p-q) * rho * K / 2 floor.
inline HardnessReport hardness_experiment(prec_t p, prec_t q, prec_t rho, int blocks,
                                          const BonusConfig& bonus, long episodes,
                                          const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
    HardnessReport report;
    report.floor = 0.5 * (p - q) * rho * static_cast<prec_t>(episodes) *
                   static_cast<prec_t>(blocks);

    for (int theta = 0; theta < 2; theta++) {
        HardInstanceParams params{theta, p, q, rho, blocks};
        ExperimentConfig config;
        config.instance = make_hard_instance(params);
        config.bonus = bonus;
        config.episodes = episodes;
        config.seeds = seeds;
        ExperimentResult result = regret_experiment(config);
        report.mean_regret[theta] = result.summary.final_regret_mean;
        for (const auto& seed_result : result.per_seed)
            report.per_seed_regret[theta].push_back(seed_result.final_regret);
    }
    report.max_regret = std::max(report.mean_regret[0], report.mean_regret[1]);
    report.passed = report.max_regret >= report.floor - 1e-9;
    return report;
}

// ---------------------------------------------------------------------------
// radius sweep
// ---------------------------------------------------------------------------

struct SweepRow {
    prec_t rho = 0.0;
    prec_t optimal_value = 0.0;
    prec_t final_regret_mean = 0.0;
    /// First episode k at which the uniform mixture of executed policies is
    /// within epsilon of optimal, averaged over seeds; -1 when never reached.
    prec_t sample_complexity_mean = -1.0;
    bool epsilon_in_plausible_range = true;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    prec_t epsilon = 0.0;
};

/// For each radius in the grid, reruns the learner on the same base instance
/// and reports the optimal robust value, final regret, and the empirical
/// sample complexity at accuracy epsilon. The base instance should satisfy
/// the vanishing-minimal-value condition for every radius (fail-state
/// augmented instances do).
inline SweepReport rho_sweep(const RmdpInstance& base, const std::vector<prec_t>& grid,
                             const BonusConfig& bonus, long episodes,
                             const std::vector<std::uint64_t>& seeds, prec_t epsilon) {
    if (grid.empty()) throw std::invalid_argument("radius grid must be nonempty");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    SweepReport report;
    report.epsilon = epsilon;
    report.rows.resize(grid.size());

    parallel_over_indices(grid.size(), [&](std::size_t g) {
        const prec_t rho = grid[g];
        RmdpInstance instance = base;
        instance.robust_radius = rho;

        ExperimentConfig config;
        config.instance = instance;
        config.bonus = bonus;
        config.episodes = episodes;
        config.seeds = seeds;
        ExperimentResult result = regret_experiment(config);

        SweepRow row;
        row.rho = rho;
        row.optimal_value = result.summary.optimal_value;
        row.final_regret_mean = result.summary.final_regret_mean;
        row.epsilon_in_plausible_range =
            epsilon <= std::min<prec_t>(1.0, rho > 0.0
                                                 ? 1.0 / (rho * instance.horizon)
                                                 : std::numeric_limits<prec_t>::infinity());

        prec_t complexity_sum = 0.0;
        long complexity_hits = 0;
        for (const auto& seed_result : result.per_seed) {
            prec_t value_sum = 0.0;
            long first = -1;
            for (const auto& ep : seed_result.episodes) {
                value_sum += ep.policy_value;
                const prec_t mixture = value_sum / static_cast<prec_t>(ep.k);
                if (result.summary.optimal_value - mixture <= epsilon) {
                    first = ep.k;
                    break;
                }
            }
            if (first >= 0) {
                complexity_sum += static_cast<prec_t>(first);
                complexity_hits++;
            }
        }
        row.sample_complexity_mean =
            complexity_hits == static_cast<long>(result.per_seed.size())
                ? complexity_sum / static_cast<prec_t>(complexity_hits)
                : -1.0;
        report.rows[g] = row;
    });
    return report;
}

inline void write_sweep_csv(const SweepReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "rho,optimal_value,final_regret_mean,sample_complexity_mean,epsilon_in_plausible_range\n";
    for (const auto& row : report.rows) {
        out << format_number(row.rho) << ',' << format_number(row.optimal_value) << ','
            << format_number(row.final_regret_mean) << ','
            << format_number(row.sample_complexity_mean) << ','
            << (row.epsilon_in_plausible_range ? 1 : 0) << '\n';
    }
}

// ---------------------------------------------------------------------------
// invariant check suite
// ---------------------------------------------------------------------------

enum class InjectedBug { None, DualCoefficient };

struct PropertyResult {
    std::string name;
    long cases = 0;
    long failures = 0;
    std::string first_failure;
    bool ok() const { return failures == 0; }
};

struct CheckReport {
    std::vector<PropertyResult> properties;
    bool all_ok = true;
    bool vacuous = false;
};

namespace detail {

inline numvec random_probability_row(Rng& rng, std::size_t n) {
    numvec row(n);
    prec_t sum = 0.0;
    for (auto& x : row) {
        x = rng.exponential();
        sum += x;
    }
    for (auto& x : row)
        x /= sum;
    return row;
}

inline numvec random_value_vector(Rng& rng, std::size_t n, prec_t hi, bool zero_min) {
    numvec v(n);
    for (auto& x : v)
        x = hi * rng.uniform();
    if (zero_min) v[rng.uniform_index(n)] = 0.0;
    return v;
}

inline PolicyTable random_policy(Rng& rng, const RmdpInstance& inst) {
    PolicyTable policy;
    policy.pi.assign(inst.horizon, std::vector<numvec>(inst.num_states));
    for (auto& stage : policy.pi)
        for (auto& row : stage)
            row = random_probability_row(rng, inst.num_actions);
    policy.deterministic = false;
    return policy;
}

/// Plain finite-horizon value iteration, written directly against the
/// kernel; deliberately does not touch the robust operators so the
/// zero-radius comparison exercises two unrelated code paths.
inline ValueTable plain_value_iteration(const RmdpInstance& inst) {
    ValueTable values = ValueTable::zeros(inst.horizon, inst.num_states);
    for (int h = inst.horizon - 1; h >= 0; h--) {
        for (int s = 0; s < inst.num_states; s++) {
            prec_t best = -std::numeric_limits<prec_t>::infinity();
            for (int a = 0; a < inst.num_actions; a++) {
                prec_t q = inst.rewards[h][s][a];
                for (int next = 0; next < inst.num_states; next++)
                    q += inst.kernel[h][s][a][next] * values.v[h + 1][next];
                best = std::max(best, q);
            }
            values.v[h][s] = best;
        }
    }
    return values;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (stream + 1) + index;
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

} // namespace detail

/// Executes every module-level invariant on randomized cases. Returns one
/// result row per property; a failing row records the reproducing case seed.
/// `inject` deliberately corrupts one code path (a wrong dual penalty
/// coefficient) so the suite's sensitivity can be demonstrated.
inline CheckReport check_suite(std::uint64_t seed, long num_cases,
                               InjectedBug inject = InjectedBug::None) {
    CheckReport report;
    if (num_cases == 0) {
        report.vacuous = true;
        report.all_ok = true;
        return report;
    }

    std::uint64_t stream = 0;
    auto run_property = [&](const std::string& name, long cases,
                            const std::function<bool(Rng&, std::string&)>& body) {
        PropertyResult pr;
        pr.name = name;
        pr.cases = cases;
        const std::uint64_t this_stream = stream++;
        for (long c = 0; c < cases; c++) {
            const std::uint64_t case_seed = detail::mix_seed(seed, this_stream, c);
            Rng rng(case_seed);
            std::string detail_msg;
            bool ok = false;
            try {
                ok = body(rng, detail_msg);
            } catch (const std::exception& e) {
                detail_msg = std::string("exception: ") + e.what();
            }
            if (!ok) {
                pr.failures++;
                if (pr.first_failure.empty())
                    pr.first_failure = "case_seed=" + std::to_string(case_seed) +
                                       (detail_msg.empty() ? "" : " " + detail_msg);
            }
        }
        report.all_ok = report.all_ok && pr.ok();
        report.properties.push_back(std::move(pr));
    };

    const prec_t horizon_bound = 8.0;

    // operator duality against the explicit transport construction
    run_property("tv-duality", num_cases, [&](Rng& rng, std::string& msg) {
        const std::size_t n = 2 + rng.uniform_index(7); // S <= 8
        const numvec p = detail::random_probability_row(rng, n);
        const numvec v =
            detail::random_value_vector(rng, n, horizon_bound, rng.uniform() < 0.3);
        const prec_t rho = 0.999 * rng.uniform();
        prec_t dual_value;
        if (inject == InjectedBug::DualCoefficient) {
            // wrong penalty coefficient: rho instead of rho/2
            const sizvec asc = sort_indices(v);
            dual_value = robustrl::detail::maximize_dual_objective(v, p, asc, rho, v[asc.front()],
                                                                   horizon_bound)
                             .first;
        } else {
            dual_value = tv_dual_full(v, p, rho, horizon_bound).value;
        }
        const prec_t primal_value = tv_primal_oracle(v, p, rho).value;
        if (std::abs(dual_value - primal_value) > 1e-9) {
            msg = "dual=" + format_number(dual_value) + " primal=" + format_number(primal_value);
            return false;
        }
        return true;
    });

    run_property("vanishing-form-consistency", num_cases, [&](Rng& rng, std::string&) {
        const std::size_t n = 2 + rng.uniform_index(7);
        const numvec p = detail::random_probability_row(rng, n);
        const numvec v = detail::random_value_vector(rng, n, horizon_bound, true);
        const prec_t rho = 0.999 * rng.uniform();
        const prec_t full = tv_dual_full(v, p, rho, horizon_bound).value;
        const prec_t vanishing = tv_dual_vanishing(v, p, rho, horizon_bound).value;
        return std::abs(full - vanishing) <= 1e-12;
    });

    run_property("bounded-ratio-identity", num_cases, [&](Rng& rng, std::string&) {
        const std::size_t n = 2 + rng.uniform_index(7);
        const numvec p = detail::random_probability_row(rng, n);
        const numvec v = detail::random_value_vector(rng, n, horizon_bound, true);
        const prec_t rho = 0.999 * rng.uniform();
        const prec_t ratio = 1.0 - rho / 2.0;
        const prec_t full = tv_dual_full(v, p, rho, horizon_bound).value;
        const prec_t scaled = ratio * bounded_ratio_expectation(v, p, ratio).value;
        return std::abs(full - scaled) <= 1e-9;
    });

    run_property("operator-radius-monotonicity", num_cases, [&](Rng& rng, std::string&) {
        const std::size_t n = 2 + rng.uniform_index(7);
        const numvec p = detail::random_probability_row(rng, n);
        const numvec v = detail::random_value_vector(rng, n, horizon_bound, false);
        prec_t previous = std::numeric_limits<prec_t>::infinity();
        for (prec_t rho = 0.0; rho < 0.95; rho += 0.1) {
            const prec_t value = tv_dual_full(v, p, rho, horizon_bound).value;
            if (value > previous + 1e-12) return false;
            previous = value;
        }
        return true;
    });

    run_property("operator-bounds", num_cases, [&](Rng& rng, std::string&) {
        const std::size_t n = 2 + rng.uniform_index(7);
        const numvec p = detail::random_probability_row(rng, n);
        const numvec v = detail::random_value_vector(rng, n, horizon_bound, false);
        const prec_t rho = 0.999 * rng.uniform();
        const prec_t ratio = 0.001 + 0.999 * rng.uniform();
        const prec_t nominal = dot(p, v);
        const prec_t low = *std::min_element(v.cbegin(), v.cend());
        for (prec_t value : {tv_dual_full(v, p, rho, horizon_bound).value,
                             bounded_ratio_expectation(v, p, ratio).value}) {
            if (value < low - 1e-9 || value > nominal + 1e-9) return false;
        }
        return true;
    });

    run_property("worst-case-certification", num_cases, [&](Rng& rng, std::string&) {
        const std::size_t n = 2 + rng.uniform_index(7);
        const numvec p = detail::random_probability_row(rng, n);
        const numvec v = detail::random_value_vector(rng, n, horizon_bound, false);
        const prec_t rho = 0.999 * rng.uniform();
        const prec_t ratio = 0.001 + 0.999 * rng.uniform();

        const DualSolution dual = tv_dual_full(v, p, rho, horizon_bound, true);
        const numvec& q = dual.worst_case_distribution;
        if (!is_probability_row(q, 1e-9)) return false;
        if (std::abs(dot(q, v) - dual.value) > 1e-9) return false;
        prec_t l1 = 0.0;
        for (std::size_t i = 0; i < n; i++)
            l1 += std::abs(q[i] - p[i]);
        if (l1 > rho + 1e-12) return false;

        const DualSolution ratio_sol = bounded_ratio_expectation(v, p, ratio);
        const numvec& qr = ratio_sol.worst_case_distribution;
        if (!is_probability_row(qr, 1e-9)) return false;
        if (std::abs(dot(qr, v) - ratio_sol.value) > 1e-9) return false;
        for (std::size_t i = 0; i < n; i++)
            if (qr[i] > p[i] / ratio + 1e-12) return false;
        return true;
    });

    auto random_small_instance = [](Rng& rng, bool vanishing) {
        const int s = 2 + static_cast<int>(rng.uniform_index(4));
        const int a = 1 + static_cast<int>(rng.uniform_index(3));
        const int h = 1 + static_cast<int>(rng.uniform_index(5));
        const prec_t rho = 0.9 * rng.uniform();
        return make_random_instance(rng.raw(), s, a, h, rho, vanishing);
    };

    run_property("bellman-residual", num_cases, [&](Rng& rng, std::string&) {
        const RmdpInstance inst = random_small_instance(rng, false);
        const PlanningResult result = robust_value_iteration(inst);
        if (bellman_residual(result, inst) > 1e-10) return false;
        auto [values, qvalues] = robust_policy_evaluation(inst, result.op, result.pi_star);
        for (int h = 0; h <= inst.horizon; h++)
            for (int s = 0; s < inst.num_states; s++)
                if (std::abs(values.v[h][s] - result.v_star.v[h][s]) > 1e-10) return false;
        return true;
    });

    run_property("adversarial-kernel-certification", num_cases, [&](Rng& rng, std::string&) {
        const RmdpInstance inst = random_small_instance(rng, false);
        const PolicyTable policy = detail::random_policy(rng, inst);
        const RobustOperatorSpec op = default_operator(inst);
        const AdversarialKernel adversarial = extract_adversarial_kernel(inst, op, policy);
        auto [robust_values, q_unused] = robust_policy_evaluation(inst, op, policy);
        const ValueTable plain = standard_policy_evaluation(inst, adversarial.kernel, policy);
        for (int h = 0; h <= inst.horizon; h++)
            for (int s = 0; s < inst.num_states; s++)
                if (std::abs(plain.v[h][s] - robust_values.v[h][s]) > 1e-9) return false;
        return true;
    });

    run_property("zero-radius-reduction", num_cases, [&](Rng& rng, std::string&) {
        RmdpInstance inst = random_small_instance(rng, false);
        inst.robust_radius = 0.0;
        const PlanningResult robust = robust_value_iteration(inst);
        const ValueTable plain = detail::plain_value_iteration(inst);
        for (int h = 0; h <= inst.horizon; h++)
            for (int s = 0; s < inst.num_states; s++)
                if (std::abs(robust.v_star.v[h][s] - plain.v[h][s]) > 1e-12) return false;
        return true;
    });

    run_property("value-gap-bounds", num_cases, [&](Rng& rng, std::string&) {
        const RmdpInstance inst = random_small_instance(rng, false);
        const PlanningResult result = robust_value_iteration(inst);
        return gap_diagnostic(result, inst).all_within;
    });

    run_property("planner-radius-monotonicity", num_cases, [&](Rng& rng, std::string&) {
        RmdpInstance inst = random_small_instance(rng, false);
        prec_t previous = std::numeric_limits<prec_t>::infinity();
        for (prec_t rho = 0.0; rho < 0.95; rho += 0.1) {
            inst.robust_radius = rho;
            const PlanningResult result = robust_value_iteration(inst);
            const prec_t value = result.v_star.v[0][inst.initial_state];
            if (value > previous + 1e-10) return false;
            previous = value;
        }
        return true;
    });

    run_property("generator-validity", num_cases, [&](Rng& rng, std::string&) {
        const RmdpInstance random_inst = random_small_instance(rng, rng.uniform() < 0.5);
        if (!validate_instance(random_inst).ok()) return false;
        HardInstanceParams params;
        params.theta = static_cast<int>(rng.uniform_index(2));
        params.q = 0.2 + 0.3 * rng.uniform();
        params.p = params.q + (0.95 - params.q) * rng.uniform();
        params.rho = std::min(params.q, 0.49) * rng.uniform();
        params.blocks = 1 + static_cast<int>(rng.uniform_index(3));
        const RmdpInstance hard = make_hard_instance(params);
        if (!validate_instance(hard).ok()) return false;
        if (!validate_instance(augment_with_fail_state(random_inst)).ok()) return false;
        return true;
    });

    run_property("hard-instance-support", num_cases, [&](Rng& rng, std::string&) {
        HardInstanceParams params;
        params.theta = static_cast<int>(rng.uniform_index(2));
        params.blocks = 1 + static_cast<int>(rng.uniform_index(3));
        const RmdpInstance hard = make_hard_instance(params);
        const auto reach = reachable_states_per_stage(hard);
        for (const auto& stage : reach)
            if (stage[kHardBadState] || !stage[kHardGoodState]) return false;
        return true;
    });

    run_property("discounted-aux-equivalence", num_cases, [&](Rng& rng, std::string&) {
        DiscountedInstance d;
        d.rho_prime = 0.5 + 0.5 * (0.02 + 0.98 * rng.uniform());
        d.gamma = d.rho_prime * (0.1 + 0.9 * rng.uniform());
        d.base = make_random_instance(rng.raw(), 2 + static_cast<int>(rng.uniform_index(4)),
                                      1 + static_cast<int>(rng.uniform_index(3)),
                                      1 + static_cast<int>(rng.uniform_index(5)), 0.0, false);
        const RmdpInstance aux = to_auxiliary_tv(d);
        const RmdpInstance base = discounted_reward_instance(d);
        const PlanningResult aux_plan =
            robust_value_iteration(aux, RobustOperatorSpec::tv_full(aux.robust_radius));
        const PlanningResult base_plan =
            robust_value_iteration(base, RobustOperatorSpec::bounded_ratio(d.rho_prime));
        prec_t scale = 1.0;
        for (int h = 0; h < d.base.horizon; h++) {
            for (int s = 0; s < d.base.num_states; s++)
                if (std::abs(scale * aux_plan.v_star.v[h][s] - base_plan.v_star.v[h][s]) > 1e-9)
                    return false;
            scale *= d.rho_prime;
        }
        return true;
    });

    return report;
}

} // namespace robustrl
