#include "robustrl/robust_operators.hpp"
#include "robustrl/rng.hpp"

#include <gtest/gtest.h>

using namespace robustrl;

namespace {

numvec random_probability_row(Rng& rng, std::size_t n) {
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

// Brute-force oracle for two-point distributions: scans the feasible set
// { q : sum |q - p| <= rho } on a fine grid. Independent of both the dual
// enumeration and the greedy transport construction.
prec_t grid_worst_case_2(const numvec& v, const numvec& p, prec_t rho) {
    prec_t best = std::numeric_limits<prec_t>::infinity();
    constexpr int steps = 20000;
    for (int i = 0; i <= steps; i++) {
        const prec_t q0 = static_cast<prec_t>(i) / steps;
        const prec_t q1 = 1.0 - q0;
        if (std::abs(q0 - p[0]) + std::abs(q1 - p[1]) > rho + 1e-12) continue;
        best = std::min(best, q0 * v[0] + q1 * v[1]);
    }
    return best;
}

// Same for the ratio-capped set { q : q <= p / ratio }.
prec_t grid_bounded_ratio_2(const numvec& v, const numvec& p, prec_t ratio) {
    prec_t best = std::numeric_limits<prec_t>::infinity();
    constexpr int steps = 20000;
    for (int i = 0; i <= steps; i++) {
        const prec_t q0 = static_cast<prec_t>(i) / steps;
        const prec_t q1 = 1.0 - q0;
        if (q0 > p[0] / ratio + 1e-12 || q1 > p[1] / ratio + 1e-12) continue;
        best = std::min(best, q0 * v[0] + q1 * v[1]);
    }
    return best;
}

} // namespace

// ---------------------------------------------------------------------------
// frozen examples
// ---------------------------------------------------------------------------

TEST(TvDualFull, ZeroRadiusIsNominalExpectation) {
    Rng rng(17);
    for (int trial = 0; trial < 50; trial++) {
        const std::size_t n = 2 + rng.uniform_index(6);
        numvec v(n);
        for (auto& x : v)
            x = 4.0 * rng.uniform();
        const numvec p = random_probability_row(rng, n);
        DualSolution sol = tv_dual_full(v, p, 0.0, 4.0);
        EXPECT_NEAR(sol.value, dot(p, v), 1e-12);
        EXPECT_NEAR(*sol.eta_star, *std::max_element(v.cbegin(), v.cend()), 1e-15);
    }
}

TEST(TvDualFull, ConstantValueIsUnmoved) {
    const numvec v = {0.7, 0.7, 0.7};
    const numvec p = {0.2, 0.3, 0.5};
    EXPECT_NEAR(tv_dual_full(v, p, 0.6, 3.0).value, 0.7, 1e-12);
}

// Relocating rho/2 = 0.1 mass from the high state onto the argmin state gives
// q = (0.6, 0.4) and expectation 0.4; the dual must attain the same value.
TEST(TvDualFull, TwoPointFrozenValue) {
    const numvec v = {0.0, 1.0};
    const numvec p = {0.5, 0.5};
    DualSolution sol = tv_dual_full(v, p, 0.2, 3.0);
    EXPECT_NEAR(sol.value, 0.4, 1e-15);
    EXPECT_NEAR(grid_worst_case_2(v, p, 0.2), 0.4, 2e-4);
}

TEST(TvDualVanishing, CoincidesOnTwoPointFrozenValue) {
    EXPECT_NEAR(tv_dual_vanishing({0.0, 1.0}, {0.5, 0.5}, 0.2, 1.0).value, 0.4, 1e-15);
}

TEST(TvDualVanishing, ZeroRadiusZeroFunction) {
    EXPECT_NEAR(tv_dual_vanishing({0.0, 0.0}, {0.5, 0.5}, 0.0, 2.0).value, 0.0, 1e-15);
    EXPECT_NEAR(tv_dual_vanishing({0.0, 0.0}, {0.5, 0.5}, 0.8, 2.0).value, 0.0, 1e-15);
}

TEST(TvDualVanishing, ZeroRadiusIsNominalExpectation) {
    const numvec v = {0.5, 2.0, 1.0};
    const numvec p = {0.2, 0.3, 0.5};
    DualSolution sol = tv_dual_vanishing(v, p, 0.0, 4.0);
    EXPECT_NEAR(sol.value, dot(p, v), 1e-12);
    EXPECT_NEAR(*sol.eta_star, 2.0, 1e-15);
}

TEST(TvPrimalOracle, TwoPointFrozenDistribution) {
    DualSolution sol = tv_primal_oracle({0.0, 1.0}, {0.5, 0.5}, 0.2);
    EXPECT_NEAR(sol.value, 0.4, 1e-15);
    ASSERT_EQ(sol.worst_case_distribution.size(), 2u);
    EXPECT_NEAR(sol.worst_case_distribution[0], 0.6, 1e-15);
    EXPECT_NEAR(sol.worst_case_distribution[1], 0.4, 1e-15);
}

TEST(TvPrimalOracle, SaturatedBudgetPutsAllMassOnArgmin) {
    // rho/2 >= 1 - p(argmin): everything lands on the minimizer
    const numvec v = {2.0, 0.5, 3.0};
    const numvec p = {0.3, 0.5, 0.2};
    DualSolution sol = tv_primal_oracle(v, p, 0.999999);
    // budget 0.4999995 matches 1 - 0.5 within float noise
    EXPECT_NEAR(sol.value, 0.5, 1e-5);
    DualSolution tighter = tv_primal_oracle(v, {0.1, 0.85, 0.05}, 0.4);
    EXPECT_NEAR(tighter.value, 0.5, 1e-12); // 0.15 removable < 0.2 budget
}

TEST(TvPrimalOracle, ZeroRadiusKeepsNominal) {
    const numvec v = {0.3, 0.9};
    const numvec p = {0.25, 0.75};
    DualSolution sol = tv_primal_oracle(v, p, 0.0);
    EXPECT_NEAR(sol.value, dot(p, v), 1e-15);
    EXPECT_EQ(sol.worst_case_distribution, p);
}

TEST(BoundedRatio, RatioOneForcesNominal) {
    const numvec v = {0.1, 0.9, 0.4};
    const numvec p = {0.5, 0.2, 0.3};
    EXPECT_NEAR(bounded_ratio_expectation(v, p, 1.0).value, dot(p, v), 1e-12);
}

TEST(BoundedRatio, TwoPointFrozenValue) {
    DualSolution sol = bounded_ratio_expectation({0.0, 1.0}, {0.5, 0.5}, 0.9);
    EXPECT_NEAR(sol.value, 4.0 / 9.0, 1e-15);
    EXPECT_NEAR(sol.worst_case_distribution[0], 5.0 / 9.0, 1e-15);
    EXPECT_NEAR(sol.worst_case_distribution[1], 4.0 / 9.0, 1e-15);
    EXPECT_NEAR(grid_bounded_ratio_2({0.0, 1.0}, {0.5, 0.5}, 0.9), 4.0 / 9.0, 2e-4);
}

TEST(BoundedRatio, ConstantValue) {
    EXPECT_NEAR(bounded_ratio_expectation({0.6, 0.6}, {0.4, 0.6}, 0.7).value, 0.6, 1e-12);
}

TEST(BoundedRatio, ZeroMassStatesStayUnreachable) {
    // 0/0 = 0 convention: the zero-mass low state cannot receive weight
    const numvec v = {0.0, 1.0, 2.0};
    const numvec p = {0.0, 0.6, 0.4};
    DualSolution sol = bounded_ratio_expectation(v, p, 0.8);
    EXPECT_DOUBLE_EQ(sol.worst_case_distribution[0], 0.0);
    EXPECT_NEAR(sol.value, 0.75 * 1.0 + 0.25 * 2.0, 1e-12);
}

// ---------------------------------------------------------------------------
// error paths
// ---------------------------------------------------------------------------

TEST(OperatorErrors, RejectsNegativeValues) {
    EXPECT_THROW(tv_dual_full({-0.1, 1.0}, {0.5, 0.5}, 0.2, 1.0), std::invalid_argument);
    EXPECT_THROW(tv_primal_oracle({-0.1, 1.0}, {0.5, 0.5}, 0.2), std::invalid_argument);
}

TEST(OperatorErrors, RejectsNonStochasticRow) {
    EXPECT_THROW(tv_dual_full({0.0, 1.0}, {0.5, 0.4}, 0.2, 1.0), std::invalid_argument);
    EXPECT_THROW(tv_primal_oracle({0.0, 1.0}, {0.5, 0.6}, 0.2), std::invalid_argument);
    EXPECT_THROW(bounded_ratio_expectation({0.0, 1.0}, {0.0, 0.0}, 0.9), std::invalid_argument);
}

TEST(OperatorErrors, RejectsBadParameters) {
    EXPECT_THROW(tv_dual_full({0.0, 1.0}, {0.5, 0.5}, 1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(tv_dual_full({0.0, 1.0}, {0.5, 0.5}, -0.1, 1.0), std::invalid_argument);
    EXPECT_THROW(bounded_ratio_expectation({0.0, 1.0}, {0.5, 0.5}, 0.0), std::invalid_argument);
    EXPECT_THROW(bounded_ratio_expectation({0.0, 1.0}, {0.5, 0.5}, 1.5), std::invalid_argument);
}

TEST(OperatorEdges, AllZeroRowFollowsUnvisitedConvention) {
    // unvisited empirical rows: the expectation terms vanish
    const numvec v = {0.0, 2.5};
    const numvec zero = {0.0, 0.0};
    const prec_t rho = 0.4, bound = 5.0;
    EXPECT_NEAR(tv_dual_vanishing(v, zero, rho, bound).value, (1.0 - rho / 2.0) * bound, 1e-12);
}

TEST(OperatorEdges, ValuesAboveBoundAreAccepted) {
    // eta search stays in [0, bound]; V itself is not clamped. With values
    // beyond the bound the clamped search can only under-shoot the exact
    // worst case, and recovers it once the bound covers max V.
    const numvec v = {0.0, 7.0};
    const numvec p = {0.5, 0.5};
    DualSolution clamped = tv_dual_full(v, p, 0.2, 3.0);
    EXPECT_LE(*clamped.eta_star, 3.0);
    const prec_t exact = tv_primal_oracle(v, p, 0.2).value;
    EXPECT_LE(clamped.value, exact + 1e-12);
    EXPECT_NEAR(tv_dual_full(v, p, 0.2, 8.0).value, exact, 1e-9);
}

// ---------------------------------------------------------------------------
// randomized properties
// ---------------------------------------------------------------------------

TEST(OperatorProperties, DualEqualsPrimalOracle) {
    Rng rng(101);
    for (int trial = 0; trial < 1500; trial++) {
        const std::size_t n = 2 + rng.uniform_index(7);
        const prec_t bound = 8.0;
        numvec v(n);
        for (auto& x : v)
            x = bound * rng.uniform();
        if (rng.uniform() < 0.3) v[rng.uniform_index(n)] = 0.0;
        const numvec p = random_probability_row(rng, n);
        const prec_t rho = 0.999 * rng.uniform();
        EXPECT_NEAR(tv_dual_full(v, p, rho, bound).value, tv_primal_oracle(v, p, rho).value,
                    1e-9);
    }
}

TEST(OperatorProperties, DualMatchesGridOracleOnPairs) {
    Rng rng(55);
    for (int trial = 0; trial < 40; trial++) {
        numvec v = {3.0 * rng.uniform(), 3.0 * rng.uniform()};
        const numvec p = random_probability_row(rng, 2);
        const prec_t rho = 0.95 * rng.uniform();
        EXPECT_NEAR(tv_dual_full(v, p, rho, 3.0).value, grid_worst_case_2(v, p, rho), 1e-3);
        const prec_t ratio = 0.05 + 0.95 * rng.uniform();
        EXPECT_NEAR(bounded_ratio_expectation(v, p, ratio).value,
                    grid_bounded_ratio_2(v, p, ratio), 1e-3);
    }
}

TEST(OperatorProperties, VanishingFormMatchesFullWhenMinIsZero) {
    Rng rng(7);
    for (int trial = 0; trial < 500; trial++) {
        const std::size_t n = 2 + rng.uniform_index(7);
        numvec v(n);
        for (auto& x : v)
            x = 6.0 * rng.uniform();
        v[rng.uniform_index(n)] = 0.0;
        const numvec p = random_probability_row(rng, n);
        const prec_t rho = 0.999 * rng.uniform();
        EXPECT_NEAR(tv_dual_full(v, p, rho, 6.0).value, tv_dual_vanishing(v, p, rho, 6.0).value,
                    1e-12);
    }
}

TEST(OperatorProperties, ScaledBoundedRatioMatchesDual) {
    Rng rng(13);
    for (int trial = 0; trial < 500; trial++) {
        const std::size_t n = 2 + rng.uniform_index(7);
        numvec v(n);
        for (auto& x : v)
            x = 5.0 * rng.uniform();
        v[rng.uniform_index(n)] = 0.0;
        const numvec p = random_probability_row(rng, n);
        const prec_t rho = 0.999 * rng.uniform();
        const prec_t ratio = 1.0 - rho / 2.0;
        EXPECT_NEAR(tv_dual_full(v, p, rho, 5.0).value,
                    ratio * bounded_ratio_expectation(v, p, ratio).value, 1e-9);
    }
}

TEST(OperatorProperties, NonincreasingInRadius) {
    Rng rng(23);
    for (int trial = 0; trial < 200; trial++) {
        const std::size_t n = 2 + rng.uniform_index(7);
        numvec v(n);
        for (auto& x : v)
            x = 4.0 * rng.uniform();
        const numvec p = random_probability_row(rng, n);
        prec_t previous = std::numeric_limits<prec_t>::infinity();
        for (prec_t rho = 0.0; rho < 0.95; rho += 0.05) {
            const prec_t value = tv_dual_full(v, p, rho, 4.0).value;
            EXPECT_LE(value, previous + 1e-12);
            previous = value;
        }
    }
}

TEST(OperatorProperties, ValueBetweenMinAndNominal) {
    Rng rng(29);
    for (int trial = 0; trial < 500; trial++) {
        const std::size_t n = 2 + rng.uniform_index(7);
        numvec v(n);
        for (auto& x : v)
            x = 4.0 * rng.uniform();
        const numvec p = random_probability_row(rng, n);
        const prec_t low = *std::min_element(v.cbegin(), v.cend());
        const prec_t nominal = dot(p, v);
        const prec_t rho = 0.999 * rng.uniform();
        const prec_t ratio = 0.001 + 0.999 * rng.uniform();
        for (prec_t value : {tv_dual_full(v, p, rho, 4.0).value,
                             tv_primal_oracle(v, p, rho).value,
                             bounded_ratio_expectation(v, p, ratio).value}) {
            EXPECT_GE(value, low - 1e-9);
            EXPECT_LE(value, nominal + 1e-9);
        }
    }
}

TEST(OperatorProperties, WorstCaseCertificates) {
    Rng rng(31);
    for (int trial = 0; trial < 500; trial++) {
        const std::size_t n = 2 + rng.uniform_index(7);
        numvec v(n);
        for (auto& x : v)
            x = 4.0 * rng.uniform();
        const numvec p = random_probability_row(rng, n);
        const prec_t rho = 0.999 * rng.uniform();

        const DualSolution dual = tv_dual_full(v, p, rho, 4.0, true);
        const numvec& q = dual.worst_case_distribution;
        ASSERT_EQ(q.size(), n);
        EXPECT_TRUE(is_probability_row(q, 1e-9));
        EXPECT_NEAR(dot(q, v), dual.value, 1e-9);
        prec_t l1 = 0.0;
        for (std::size_t i = 0; i < n; i++)
            l1 += std::abs(q[i] - p[i]);
        EXPECT_LE(l1, rho + 1e-12);

        const prec_t ratio = 0.001 + 0.999 * rng.uniform();
        const DualSolution br = bounded_ratio_expectation(v, p, ratio);
        const numvec& qr = br.worst_case_distribution;
        EXPECT_TRUE(is_probability_row(qr, 1e-9));
        EXPECT_NEAR(dot(qr, v), br.value, 1e-9);
        for (std::size_t i = 0; i < n; i++)
            EXPECT_LE(qr[i], p[i] / ratio + 1e-12);
    }
}

TEST(OperatorProperties, EtaStarStaysInRange) {
    Rng rng(37);
    for (int trial = 0; trial < 300; trial++) {
        const std::size_t n = 2 + rng.uniform_index(7);
        const prec_t bound = 1.0 + 7.0 * rng.uniform();
        numvec v(n);
        for (auto& x : v)
            x = 1.2 * bound * rng.uniform();
        const numvec p = random_probability_row(rng, n);
        const prec_t rho = 0.999 * rng.uniform();
        const DualSolution sol = tv_dual_full(v, p, rho, bound);
        EXPECT_GE(*sol.eta_star, 0.0);
        EXPECT_LE(*sol.eta_star, bound);
    }
}
