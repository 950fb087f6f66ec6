// Command-line laboratory for tabular robust MDPs: instance generation,
// exact robust planning and evaluation, the interactive learner with exact
// regret accounting, the support-shift hardness demonstration, radius
// sweeps, and the randomized invariant check suite.
//
// Exit codes: 0 ok, 1 usage error, 2 validation failure, 3 property failure.

#include "robustrl/experiments.hpp"
#include "robustrl/io.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace robustrl;

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ','))
        if (!token.empty()) seeds.push_back(std::stoull(token));
    if (seeds.empty()) throw std::invalid_argument("seed list is empty");
    return seeds;
}

std::vector<prec_t> parse_grid(const std::string& text) {
    std::vector<prec_t> grid;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ','))
        if (!token.empty()) grid.push_back(std::stod(token));
    if (grid.empty()) throw std::invalid_argument("grid is empty");
    return grid;
}

RobustOperatorSpec make_operator(const std::string& kind, prec_t parameter) {
    if (kind == "full") return RobustOperatorSpec::tv_full(parameter);
    if (kind == "vanishing") return RobustOperatorSpec::tv_vanishing(parameter);
    if (kind == "bounded-ratio") return RobustOperatorSpec::bounded_ratio(parameter);
    throw std::invalid_argument("unknown operator kind: " + kind);
}

RmdpInstance load_validated(const std::string& path) {
    RmdpInstance inst = load_instance(path);
    ValidationReport report = validate_instance(inst);
    if (!report.ok())
        throw std::invalid_argument("instance file failed validation:\n" + report.to_string());
    return inst;
}

struct LearnOptions {
    std::string instance_path, csv_path, policy_path, plot_path;
    long episodes = 1024;
    std::uint64_t seed = 0;
    BonusConfig bonus;
};

int run_learn(const LearnOptions& opt) {
    ExperimentConfig config;
    config.instance = load_validated(opt.instance_path);
    config.bonus = opt.bonus;
    config.episodes = opt.episodes;
    config.seeds = {opt.seed};
    ExperimentResult result = regret_experiment(config);
    const SeedResult& seed_result = result.per_seed.front();

    detail::write_seed_csv(opt.csv_path, result, seed_result);
    if (!opt.policy_path.empty()) save_policy(seed_result.output_policy, opt.policy_path);
    if (!opt.plot_path.empty()) {
        std::vector<std::pair<prec_t, prec_t>> curve;
        curve.reserve(seed_result.episodes.size());
        for (const auto& row : seed_result.episodes)
            curve.emplace_back(static_cast<prec_t>(row.k), row.cumulative_regret);
        write_svg_curves(opt.plot_path, {{"cumulative regret", curve}});
    }

    std::cout << "episodes: " << opt.episodes << "\n"
              << "optimal robust value: " << format_number(result.summary.optimal_value) << "\n"
              << "final cumulative regret: " << format_number(seed_result.final_regret) << "\n"
              << "sandwich rate: " << format_number(result.summary.sandwich_rate) << "\n"
              << "csv: " << opt.csv_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tabular robust MDP laboratory"};
    app.require_subcommand(1);
    // options may come from an INI file with one [subcommand] section each,
    // e.g. `robustrl --config run.ini learn`
    app.set_config("--config");

    // ---------------------------------------------------------------- gen
    auto* gen = app.add_subcommand("gen", "generate instance files");
    gen->require_subcommand(1);

    HardInstanceParams hard_params;
    std::string gen_out;
    auto* gen_hard = gen->add_subcommand("hard", "two-state support-shift instance");
    gen_hard->add_option("--theta", hard_params.theta, "which action escapes with probability p")
        ->check(CLI::Range(0, 1));
    gen_hard->add_option("--p", hard_params.p, "higher escape probability");
    gen_hard->add_option("--q", hard_params.q, "lower escape probability");
    gen_hard->add_option("--rho", hard_params.rho, "adversarial transition mass");
    gen_hard->add_option("--blocks", hard_params.blocks, "number of three-step blocks");
    gen_hard->add_option("--out", gen_out, "output instance file")->required();
    gen_hard->callback([&]() {
        save_instance(make_hard_instance(hard_params), gen_out);
        std::cout << "wrote " << gen_out << "\n";
    });

    std::uint64_t gen_seed = 0;
    int gen_states = 4, gen_actions = 2, gen_horizon = 5;
    prec_t gen_rho = 0.0, gen_sparsity = 0.0;
    bool gen_fail_state = false;
    auto* gen_random = gen->add_subcommand("random", "seeded random instance");
    gen_random->add_option("--seed", gen_seed, "generator seed")->required();
    gen_random->add_option("--S", gen_states, "number of states");
    gen_random->add_option("--A", gen_actions, "number of actions");
    gen_random->add_option("--H", gen_horizon, "horizon");
    gen_random->add_option("--rho", gen_rho, "robust radius");
    gen_random->add_flag("--fail-state", gen_fail_state, "append an absorbing zero-reward state");
    gen_random->add_option("--sparsity", gen_sparsity, "probability of zeroing kernel entries");
    gen_random->add_option("--out", gen_out, "output instance file")->required();
    gen_random->callback([&]() {
        save_instance(make_random_instance(gen_seed, gen_states, gen_actions, gen_horizon, gen_rho,
                                           gen_fail_state, gen_sparsity),
                      gen_out);
        std::cout << "wrote " << gen_out << "\n";
    });

    prec_t gen_gamma = 0.9, gen_rho_prime = 0.9;
    std::string gen_base_out;
    auto* gen_aux = gen->add_subcommand(
        "discounted-aux", "random discounted ratio-bounded instance and its TV-form reduction");
    gen_aux->add_option("--seed", gen_seed, "generator seed")->required();
    gen_aux->add_option("--S", gen_states, "number of states");
    gen_aux->add_option("--A", gen_actions, "number of actions");
    gen_aux->add_option("--H", gen_horizon, "horizon");
    gen_aux->add_option("--gamma", gen_gamma, "discount factor");
    gen_aux->add_option("--rho-prime", gen_rho_prime, "density-ratio parameter in (1/2,1]");
    gen_aux->add_option("--out", gen_out, "output file for the TV-form instance")->required();
    gen_aux->add_option("--base-out", gen_base_out,
                        "optional output for the discounted-reward base instance");
    gen_aux->callback([&]() {
        DiscountedInstance d;
        d.base = make_random_instance(gen_seed, gen_states, gen_actions, gen_horizon, 0.0, false);
        d.gamma = gen_gamma;
        d.rho_prime = gen_rho_prime;
        save_instance(to_auxiliary_tv(d), gen_out);
        std::cout << "wrote " << gen_out << "\n";
        if (!gen_base_out.empty()) {
            save_instance(discounted_reward_instance(d), gen_base_out);
            std::cout << "wrote " << gen_base_out << "\n";
        }
    });

    // --------------------------------------------------------------- plan
    std::string plan_instance, plan_out, plan_operator = "full";
    prec_t plan_parameter = -1.0;
    auto* plan = app.add_subcommand("plan", "exact robust value iteration");
    plan->add_option("--instance", plan_instance, "instance file")->required();
    plan->add_option("--out", plan_out, "output planning-result file")->required();
    plan->add_option("--operator", plan_operator, "full | vanishing | bounded-ratio");
    plan->add_option("--parameter", plan_parameter,
                     "operator parameter override (default: the instance radius)");
    plan->callback([&]() {
        RmdpInstance inst = load_validated(plan_instance);
        const prec_t parameter = plan_parameter >= 0.0 ? plan_parameter : inst.robust_radius;
        PlanningResult result =
            robust_value_iteration(inst, make_operator(plan_operator, parameter));
        GapDiagnostic gaps = gap_diagnostic(result, inst);
        std::ofstream out(plan_out);
        if (!out) throw std::runtime_error("cannot open for writing: " + plan_out);
        out << planning_result_to_json(result, gaps).dump(2) << '\n';
        std::cout << "optimal robust value at the initial state: "
                  << format_number(result.v_star.v[0][inst.initial_state]) << "\n"
                  << "value gaps within analytic bounds: " << (gaps.all_within ? "yes" : "no")
                  << "\nwrote " << plan_out << "\n";
    });

    // ----------------------------------------------------------- evaluate
    std::string eval_instance, eval_policy, eval_out, eval_operator = "full";
    prec_t eval_parameter = -1.0;
    auto* evaluate = app.add_subcommand("evaluate", "exact robust policy evaluation");
    evaluate->add_option("--instance", eval_instance, "instance file")->required();
    evaluate->add_option("--policy", eval_policy, "policy file")->required();
    evaluate->add_option("--out", eval_out, "output value file")->required();
    evaluate->add_option("--operator", eval_operator, "full | vanishing | bounded-ratio");
    evaluate->add_option("--parameter", eval_parameter,
                         "operator parameter override (default: the instance radius)");
    evaluate->callback([&]() {
        RmdpInstance inst = load_validated(eval_instance);
        PolicyTable policy = load_policy(eval_policy);
        const prec_t parameter = eval_parameter >= 0.0 ? eval_parameter : inst.robust_radius;
        auto [values, qvalues] =
            robust_policy_evaluation(inst, make_operator(eval_operator, parameter), policy);
        json doc;
        doc["v"] = values.v;
        doc["q"] = qvalues.q;
        doc["value_at_initial_state"] = values.v[0][inst.initial_state];
        std::ofstream out(eval_out);
        if (!out) throw std::runtime_error("cannot open for writing: " + eval_out);
        out << doc.dump(2) << '\n';
        std::cout << "robust value of the policy at the initial state: "
                  << format_number(values.v[0][inst.initial_state]) << "\nwrote " << eval_out
                  << "\n";
    });

    // -------------------------------------------------------------- learn
    LearnOptions learn_opt;
    auto* learn = app.add_subcommand("learn", "interactive learner with exact regret accounting");
    learn->add_option("--instance", learn_opt.instance_path, "instance file")->required();
    learn->add_option("--episodes", learn_opt.episodes, "episode budget K");
    learn->add_option("--seed", learn_opt.seed, "run seed")->required();
    learn->add_option("--delta", learn_opt.bonus.delta, "failure probability");
    learn->add_option("--c1", learn_opt.bonus.c1, "variance bonus constant");
    learn->add_option("--c2", learn_opt.bonus.c2, "additive bonus constant");
    learn->add_option("--bonus-scale", learn_opt.bonus.bonus_scale, "bonus multiplier");
    learn->add_option("--out-csv", learn_opt.csv_path, "per-episode regret CSV")->required();
    learn->add_option("--out-policy", learn_opt.policy_path, "output policy file");
    learn->add_option("--plot", learn_opt.plot_path, "optional SVG regret curve");
    learn->callback([&]() { run_learn(learn_opt); });

    // ----------------------------------------------------------- hardness
    prec_t hardness_p = 0.8, hardness_q = 0.4, hardness_rho = 0.2;
    int hardness_blocks = 1;
    long hardness_episodes = 5000;
    std::string hardness_seeds = "1,2,3", hardness_out;
    BonusConfig hardness_bonus;
    auto* hardness = app.add_subcommand(
        "hardness", "learner regret on both orientations of the hard instance");
    hardness->add_option("--p", hardness_p, "higher escape probability");
    hardness->add_option("--q", hardness_q, "lower escape probability");
    hardness->add_option("--rho", hardness_rho, "adversarial transition mass");
    hardness->add_option("--blocks", hardness_blocks, "number of three-step blocks");
    hardness->add_option("--episodes", hardness_episodes, "episode budget K");
    hardness->add_option("--seeds", hardness_seeds, "comma-separated seed list")->required();
    hardness->add_option("--bonus-scale", hardness_bonus.bonus_scale, "bonus multiplier");
    hardness->add_option("--out", hardness_out, "optional JSON report path");
    hardness->callback([&]() {
        HardnessReport report =
            hardness_experiment(hardness_p, hardness_q, hardness_rho, hardness_blocks,
                                hardness_bonus, hardness_episodes, parse_seed_list(hardness_seeds));
        std::cout << "mean regret, orientation 0: " << format_number(report.mean_regret[0]) << "\n"
                  << "mean regret, orientation 1: " << format_number(report.mean_regret[1]) << "\n"
                  << "max over orientations:      " << format_number(report.max_regret) << "\n"
                  << "linear-regret floor:        " << format_number(report.floor) << "\n"
                  << "floor attained: " << (report.passed ? "yes" : "no") << "\n";
        if (!hardness_out.empty()) {
            json doc;
            doc["mean_regret"] = {report.mean_regret[0], report.mean_regret[1]};
            doc["per_seed_regret"] = {report.per_seed_regret[0], report.per_seed_regret[1]};
            doc["max_regret"] = report.max_regret;
            doc["floor"] = report.floor;
            doc["passed"] = report.passed;
            std::ofstream out(hardness_out);
            out << doc.dump(2) << '\n';
            std::cout << "wrote " << hardness_out << "\n";
        }
    });

    // -------------------------------------------------------------- sweep
    std::string sweep_instance, sweep_grid = "0.0,0.3,0.6,0.9", sweep_seeds = "1,2,3,4,5";
    std::string sweep_out = "sweep.csv", sweep_plot;
    long sweep_episodes = 4096;
    prec_t sweep_epsilon = 0.25;
    BonusConfig sweep_bonus;
    auto* sweep = app.add_subcommand("sweep", "rerun the learner over a radius grid");
    sweep->add_option("--instance", sweep_instance, "base instance file (fail-state recommended)")
        ->required();
    sweep->add_option("--grid", sweep_grid, "comma-separated radius grid");
    sweep->add_option("--episodes", sweep_episodes, "episode budget per grid point");
    sweep->add_option("--seeds", sweep_seeds, "comma-separated seed list")->required();
    sweep->add_option("--epsilon", sweep_epsilon, "target accuracy for sample complexity");
    sweep->add_option("--bonus-scale", sweep_bonus.bonus_scale, "bonus multiplier");
    sweep->add_option("--out", sweep_out, "output CSV");
    sweep->add_option("--plot", sweep_plot, "optional SVG of final regret against the radius");
    sweep->callback([&]() {
        RmdpInstance base = load_validated(sweep_instance);
        SweepReport report = rho_sweep(base, parse_grid(sweep_grid), sweep_bonus, sweep_episodes,
                                       parse_seed_list(sweep_seeds), sweep_epsilon);
        write_sweep_csv(report, sweep_out);
        std::cout << "rho  optimal_value  final_regret  sample_complexity\n";
        for (const auto& row : report.rows)
            std::cout << format_number(row.rho) << "  " << format_number(row.optimal_value) << "  "
                      << format_number(row.final_regret_mean) << "  "
                      << format_number(row.sample_complexity_mean)
                      << (row.epsilon_in_plausible_range ? "" : "  (epsilon above plausible range)")
                      << "\n";
        std::cout << "wrote " << sweep_out << "\n";
        if (!sweep_plot.empty()) {
            std::vector<std::pair<prec_t, prec_t>> curve;
            for (const auto& row : report.rows)
                curve.emplace_back(row.rho, row.final_regret_mean);
            write_svg_curves(sweep_plot, {{"final regret", curve}});
            std::cout << "wrote " << sweep_plot << "\n";
        }
    });

    // -------------------------------------------------------------- check
    std::uint64_t check_seed = 0;
    long check_cases = 1000;
    std::string check_inject;
    bool check_failed = false;
    auto* check = app.add_subcommand("check", "randomized invariant suite");
    check->add_option("--seed", check_seed, "suite seed")->required();
    check->add_option("--num-cases", check_cases, "random cases per property");
    check->add_option("--inject-bug", check_inject,
                      "deliberately corrupt a code path (dual-coefficient)")
        ->check(CLI::IsMember({"dual-coefficient"}));
    check->callback([&]() {
        const InjectedBug bug =
            check_inject == "dual-coefficient" ? InjectedBug::DualCoefficient : InjectedBug::None;
        CheckReport report = check_suite(check_seed, check_cases, bug);
        if (report.vacuous) {
            std::cout << "WARNING: num-cases is 0, the suite passes vacuously\n";
            return;
        }
        for (const auto& property : report.properties) {
            std::cout << (property.ok() ? "PASS " : "FAIL ") << property.name << " ("
                      << property.cases << " cases";
            if (!property.ok())
                std::cout << ", " << property.failures << " failures, first: "
                          << property.first_failure;
            std::cout << ")\n";
        }
        check_failed = !report.all_ok;
        std::cout << (report.all_ok ? "all properties hold\n" : "property failures detected\n");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return check_failed ? 3 : 0;
}
