#include "robustrl/experiments.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace robustrl;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

ExperimentConfig small_config(std::uint64_t instance_seed, long episodes) {
    ExperimentConfig config;
    config.instance = make_random_instance(instance_seed, 3, 2, 4, 0.3, true);
    config.episodes = episodes;
    config.seeds = {1, 2};
    return config;
}

} // namespace

TEST(RegretExperiment, OraclePolicyModeHasZeroRegret) {
    ExperimentConfig config = small_config(21, 50);
    config.oracle_policy_mode = true;
    ExperimentResult result = regret_experiment(config);
    for (const auto& seed_result : result.per_seed)
        for (const auto& row : seed_result.episodes) {
            EXPECT_DOUBLE_EQ(row.instant_regret, 0.0);
            EXPECT_DOUBLE_EQ(row.cumulative_regret, 0.0);
        }
    EXPECT_DOUBLE_EQ(result.summary.final_regret_mean, 0.0);
}

TEST(RegretExperiment, RejectsEmptyBudgetOrSeeds) {
    ExperimentConfig config = small_config(22, 10);
    config.episodes = 0;
    EXPECT_THROW(regret_experiment(config), std::invalid_argument);
    config = small_config(22, 10);
    config.seeds.clear();
    EXPECT_THROW(regret_experiment(config), std::invalid_argument);
}

TEST(RegretExperiment, ValidationFailuresSurfaceBeforeCompute) {
    ExperimentConfig config = small_config(23, 10);
    config.instance.rewards[0][0][0] = 2.0;
    EXPECT_THROW(regret_experiment(config), std::invalid_argument);
}

TEST(RegretExperiment, InstantRegretNonnegativeAndCumulativeMonotone) {
    ExperimentConfig config = small_config(24, 300);
    ExperimentResult result = regret_experiment(config);
    for (const auto& seed_result : result.per_seed) {
        prec_t previous = 0.0;
        for (const auto& row : seed_result.episodes) {
            EXPECT_GE(row.instant_regret, -1e-9);
            EXPECT_GE(row.cumulative_regret, previous - 1e-9);
            previous = row.cumulative_regret;
        }
    }
}

TEST(RegretExperiment, IdenticalConfigsProduceByteIdenticalCsv) {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "robustrl_csv_determinism";
    fs::remove_all(base);

    for (const char* sub : {"a", "b"}) {
        ExperimentConfig config = small_config(25, 120);
        config.output_dir = (base / sub).string();
        regret_experiment(config);
    }
    for (const char* name : {"regret_seed1.csv", "regret_seed2.csv", "summary.json"}) {
        const std::string a = read_file(base / "a" / name);
        const std::string b = read_file(base / "b" / name);
        ASSERT_FALSE(a.empty());
        EXPECT_EQ(a, b) << name;
    }
    fs::remove_all(base);
}

TEST(RegretExperiment, CsvEmbedsProvenance) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "robustrl_csv_provenance";
    fs::remove_all(dir);
    ExperimentConfig config = small_config(26, 30);
    config.output_dir = dir.string();
    ExperimentResult result = regret_experiment(config);

    const std::string text = read_file(dir / "regret_seed1.csv");
    char expected[32];
    std::snprintf(expected, sizeof(expected), "%016llx",
                  static_cast<unsigned long long>(result.config_hash));
    EXPECT_NE(text.find(std::string("# config_hash=") + expected), std::string::npos);
    EXPECT_NE(text.find("k,robust_value_of_pi_k,instantaneous_regret,cumulative_regret,sandwich_ok"),
              std::string::npos);
    fs::remove_all(dir);
}

TEST(RegretExperiment, ConfigHashTracksInputs) {
    ExperimentConfig a = small_config(27, 40);
    ExperimentConfig b = small_config(27, 40);
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.bonus.bonus_scale = 0.5;
    EXPECT_NE(config_hash(a), config_hash(b));
    ExperimentConfig c = small_config(28, 40);
    EXPECT_NE(config_hash(a), config_hash(c));
}

TEST(HardnessExperiment, FloorHoldsAtSmallBudget) {
    HardnessReport report = hardness_experiment(0.8, 0.4, 0.2, 1, {}, 500, {1, 2, 3});
    EXPECT_NEAR(report.floor, 0.5 * 0.4 * 0.2 * 500, 1e-12);
    EXPECT_GE(report.max_regret, report.floor - 1e-9);
    EXPECT_TRUE(report.passed);
    // one orientation matches the uninformed tie-break and suffers nothing
    EXPECT_NEAR(std::min(report.mean_regret[0], report.mean_regret[1]), 0.0, 1e-9);
}

TEST(HardnessExperiment, ZeroRadiusFloorDegenerates) {
    HardnessReport report = hardness_experiment(0.8, 0.4, 0.0, 1, {}, 200, {1});
    EXPECT_DOUBLE_EQ(report.floor, 0.0);
    EXPECT_TRUE(report.passed);
}

TEST(HardnessExperiment, FailStateAugmentationRestoresLearnability) {
    // contrast case: adding a reachable-by-adversary zero state removes the
    // support-shift trap, so both orientations learn equally well
    for (int theta = 0; theta < 2; theta++) {
        ExperimentConfig config;
        config.instance = augment_with_fail_state(make_hard_instance({theta, 0.8, 0.4, 0.2, 1}));
        config.episodes = 400;
        config.seeds = {1, 2};
        ExperimentResult result = regret_experiment(config);
        // linear regret on the trap instance would be ~0.08 per episode (32 total)
        EXPECT_LE(result.summary.final_regret_mean, 2.0);
    }
}

TEST(RhoSweep, OptimalValueColumnNonincreasing) {
    RmdpInstance base = make_random_instance(31, 3, 2, 4, 0.0, true);
    SweepReport report = rho_sweep(base, {0.0, 0.3, 0.6, 0.9}, {}, 200, {1, 2}, 0.25);
    ASSERT_EQ(report.rows.size(), 4u);
    for (std::size_t i = 1; i < report.rows.size(); i++)
        EXPECT_LE(report.rows[i].optimal_value, report.rows[i - 1].optimal_value + 1e-10);
}

TEST(RhoSweep, LargerRadiusNeedsNoMoreSamples) {
    RmdpInstance base = make_random_instance(77, 3, 2, 4, 0.0, true);
    BonusConfig bonus;
    bonus.bonus_scale = 0.075;
    SweepReport report = rho_sweep(base, {0.0, 0.9}, bonus, 3000, {1, 2, 3, 4, 5}, 0.5);
    ASSERT_GE(report.rows[0].sample_complexity_mean, 0.0);
    ASSERT_GE(report.rows[1].sample_complexity_mean, 0.0);
    EXPECT_LE(report.rows[1].sample_complexity_mean, report.rows[0].sample_complexity_mean);
}

TEST(RhoSweep, FlagsImplausibleEpsilon) {
    RmdpInstance base = make_random_instance(32, 2, 2, 4, 0.0, true);
    SweepReport report = rho_sweep(base, {0.9}, {}, 50, {1}, 0.9);
    // 0.9 > min{1, 1/(0.9*4)} = 0.277...
    EXPECT_FALSE(report.rows[0].epsilon_in_plausible_range);
}

TEST(RhoSweep, WritesCsv) {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "robustrl_sweep.csv";
    RmdpInstance base = make_random_instance(33, 2, 2, 3, 0.0, true);
    SweepReport report = rho_sweep(base, {0.0, 0.5}, {}, 60, {1}, 0.5);
    write_sweep_csv(report, path.string());
    const std::string text = read_file(path);
    EXPECT_NE(text.find("rho,optimal_value,final_regret_mean"), std::string::npos);
    fs::remove(path);
}

TEST(CheckSuite, DefaultRunPasses) {
    CheckReport report = check_suite(2024, 60);
    for (const auto& property : report.properties)
        EXPECT_EQ(property.failures, 0) << property.name << ": " << property.first_failure;
    EXPECT_TRUE(report.all_ok);
    EXPECT_FALSE(report.vacuous);
}

TEST(CheckSuite, InjectedDualCoefficientBugIsCaught) {
    CheckReport report = check_suite(2024, 40, InjectedBug::DualCoefficient);
    ASSERT_FALSE(report.properties.empty());
    EXPECT_EQ(report.properties[0].name, "tv-duality");
    EXPECT_GT(report.properties[0].failures, 0);
    EXPECT_FALSE(report.all_ok);
    EXPECT_FALSE(report.properties[0].first_failure.empty());
}

TEST(CheckSuite, ZeroCasesIsVacuousPass) {
    CheckReport report = check_suite(1, 0);
    EXPECT_TRUE(report.all_ok);
    EXPECT_TRUE(report.vacuous);
    EXPECT_TRUE(report.properties.empty());
}

TEST(Workers, EnvironmentVariableCapsPool) {
    ASSERT_EQ(setenv("ROBUSTRL_WORKERS", "2", 1), 0);
    EXPECT_EQ(worker_limit(), 2u);
    ASSERT_EQ(setenv("ROBUSTRL_WORKERS", "not-a-number", 1), 0);
    EXPECT_GE(worker_limit(), 1u);
    unsetenv("ROBUSTRL_WORKERS");
}
