// Robust expectation operators for rectangular robust sets, plus the explicit
// primal constructions used as ground truth against the dual evaluations.
//
// The dual-form total-variation operator of radius rho is
//
//     E_rho[V; p] = sup_{eta in [0, B]} { -E_p[(eta - V)_+]
//                                          - (rho/2) * (eta - min_s V(s))_+ + eta },
//
// with B the horizon bound. It equals the worst-case expectation over
// distributions q with sum_s |q(s) - p(s)| <= rho, i.e. the adversary may
// relocate probability mass up to rho/2. The objective is piecewise linear
// and concave in eta, so the supremum is attained on the breakpoint set
// {0, B, min V} united with the values of V; the operators evaluate every
// breakpoint exactly and tie-break toward the smallest eta.

#pragma once

#include "robustrl/definitions.hpp"

#include <limits>
#include <optional>

namespace robustrl {

/// Value of a robust expectation together with its certificates.
struct DualSolution {
    prec_t value = 0.0;
    /// Maximizing dual variable, in [0, B]; absent for primal-only routes.
    std::optional<prec_t> eta_star;
    /// A primal minimizer q with E_q[V] == value; empty when not requested
    /// or when the operator value is not attained by any distribution.
    numvec worst_case_distribution;
};

namespace detail {

inline void check_value_vector(const numvec& v) {
    if (v.empty()) throw std::invalid_argument("value vector must be nonempty");
    for (prec_t x : v) {
        if (!(x >= 0.0)) throw std::invalid_argument("value vector entries must be >= 0");
    }
}

/// Accepts proper probability rows and, for the dual operators only, the
/// all-zero row used for unvisited empirical estimates.
inline void check_nominal_row(const numvec& p, const numvec& v, bool allow_zero_row) {
    if (p.size() != v.size())
        throw std::invalid_argument("nominal row and value vector sizes differ");
    if (allow_zero_row && is_zero_row(p)) return;
    if (!is_probability_row(p, 1e-9))
        throw std::invalid_argument("nominal row is not a probability distribution");
}

/// Maximizes g(eta) = eta - E_p[(eta - V)_+] - coef * (eta - anchor)_+ over
/// eta in [0, bound] by ascending passes over the breakpoints. Requires
/// anchor >= 0. The value is the exact maximum; the reported eta is the
/// smallest breakpoint within a small tolerance of it (plateaus, e.g. beyond
/// max V at zero radius, tilt by ~1e-16 when the row's float sum misses 1,
/// which would otherwise break the smallest-eta tie rule).
inline std::pair<prec_t, prec_t> maximize_dual_objective(const numvec& v, const numvec& p,
                                                         const sizvec& ascending, prec_t coef,
                                                         prec_t anchor, prec_t bound) {
    assert(bound >= 0.0);
    const std::size_t n = v.size();
    constexpr prec_t tie_tolerance = 1e-11;

    // one ascending sweep over the breakpoints {0} + values of V + {bound};
    // the inclusion pointer tracks { s : V(s) <= eta }
    auto sweep = [&](auto&& visit) {
        std::size_t included = 0;
        prec_t mass = 0.0;   // sum of p(s)
        prec_t mass_v = 0.0; // sum of p(s) * V(s)
        auto evaluate = [&](prec_t eta) {
            while (included < n && v[ascending[included]] <= eta) {
                mass += p[ascending[included]];
                mass_v += p[ascending[included]] * v[ascending[included]];
                included++;
            }
            const prec_t expected_part = mass * eta - mass_v;
            const prec_t penalty = eta > anchor ? coef * (eta - anchor) : 0.0;
            return visit(eta, eta - expected_part - penalty);
        };
        if (evaluate(0.0)) return;
        for (std::size_t j = 0; j < n; j++) {
            const prec_t eta = v[ascending[j]];
            if (eta <= 0.0 || eta >= bound) continue;
            if (evaluate(eta)) return;
        }
        evaluate(bound);
    };

    prec_t best_value = -std::numeric_limits<prec_t>::infinity();
    sweep([&](prec_t, prec_t g) {
        best_value = std::max(best_value, g);
        return false;
    });

    prec_t best_eta = bound;
    sweep([&](prec_t eta, prec_t g) {
        if (g >= best_value - tie_tolerance) {
            best_eta = eta;
            return true; // smallest near-maximal eta found
        }
        return false;
    });
    return {best_value, best_eta};
}

/// Greedy worst case under a transport budget: removes `budget` total mass
/// from states in decreasing value order (smallest index first among ties,
/// capped at each state's available mass) and deposits it on the smallest
/// argmin-value state.
inline numvec transport_worst_case(const numvec& v, const numvec& p, prec_t budget) {
    numvec q(p);
    const std::size_t sink = argmin_index(v);

    sizvec desc(v.size());
    std::iota(desc.begin(), desc.end(), std::size_t(0));
    std::stable_sort(desc.begin(), desc.end(),
                     [&v](std::size_t a, std::size_t b) { return v[a] > v[b]; });

    prec_t moved = 0.0;
    for (std::size_t i : desc) {
        if (i == sink) continue;
        if (moved >= budget) break;
        const prec_t take = std::min(q[i], budget - moved);
        q[i] -= take;
        moved += take;
    }
    q[sink] += moved;
    return q;
}

} // namespace detail

/// Dual-form TV robust expectation, valid for any nonnegative V.
/// Entries of V above `horizon_bound` are permitted; the eta search stays
/// within [0, horizon_bound] regardless.
inline DualSolution tv_dual_full(const numvec& v, const numvec& p, prec_t rho,
                                 prec_t horizon_bound, bool with_worst_case = false) {
    detail::check_value_vector(v);
    detail::check_nominal_row(p, v, /*allow_zero_row=*/true);
    if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("radius must lie in [0,1)");
    if (!(horizon_bound > 0.0)) throw std::invalid_argument("horizon bound must be positive");

    const sizvec asc = sort_indices(v);
    const prec_t min_v = v[asc.front()];
    auto [value, eta] =
        detail::maximize_dual_objective(v, p, asc, rho / 2.0, min_v, horizon_bound);

    DualSolution sol;
    sol.value = value;
    sol.eta_star = eta;
    if (with_worst_case && !is_zero_row(p))
        sol.worst_case_distribution = detail::transport_worst_case(v, p, rho / 2.0);
    return sol;
}

/// TV robust expectation specialized to value vectors with vanishing minimum:
/// sup_eta { -E_p[(eta - V)_+] + (1 - rho/2) * eta }. Defined for any V;
/// coincides with tv_dual_full whenever min V = 0. A worst-case certificate
/// is attached only in that case (otherwise the value is not attained by any
/// distribution).
inline DualSolution tv_dual_vanishing(const numvec& v, const numvec& p, prec_t rho,
                                      prec_t horizon_bound, bool with_worst_case = false) {
    detail::check_value_vector(v);
    detail::check_nominal_row(p, v, /*allow_zero_row=*/true);
    if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("radius must lie in [0,1)");
    if (!(horizon_bound > 0.0)) throw std::invalid_argument("horizon bound must be positive");

    const sizvec asc = sort_indices(v);
    auto [value, eta] = detail::maximize_dual_objective(v, p, asc, rho / 2.0, 0.0, horizon_bound);

    DualSolution sol;
    sol.value = value;
    sol.eta_star = eta;
    if (with_worst_case && !is_zero_row(p) && v[asc.front()] <= kProbTolerance)
        sol.worst_case_distribution = detail::transport_worst_case(v, p, rho / 2.0);
    return sol;
}

/// Value-only fast path for the planning loops; `ascending` must sort v
/// increasingly (shared across all rows at a stage).
inline prec_t tv_dual_vanishing_value(const numvec& v, const numvec& p, const sizvec& ascending,
                                      prec_t rho, prec_t horizon_bound) {
    return detail::maximize_dual_objective(v, p, ascending, rho / 2.0, 0.0, horizon_bound).first;
}

inline prec_t tv_dual_full_value(const numvec& v, const numvec& p, const sizvec& ascending,
                                 prec_t rho, prec_t horizon_bound) {
    return detail::maximize_dual_objective(v, p, ascending, rho / 2.0, v[ascending.front()],
                                           horizon_bound)
        .first;
}

/// Direct primal construction of the TV worst case: relocates total mass
/// rho/2 from the highest-value states onto the smallest argmin-value state.
/// Ground-truth route for the dual evaluation; the returned value is computed
/// from the constructed distribution, never from the dual.
inline DualSolution tv_primal_oracle(const numvec& v, const numvec& p, prec_t rho) {
    detail::check_value_vector(v);
    detail::check_nominal_row(p, v, /*allow_zero_row=*/false);
    if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("radius must lie in [0,1)");

    DualSolution sol;
    sol.worst_case_distribution = detail::transport_worst_case(v, p, rho / 2.0);
    sol.value = dot(sol.worst_case_distribution, v);
    return sol;
}

/// Worst-case expectation over distributions with bounded density ratio:
///
///     inf { E_q[V] : q in Delta, q(s) <= p(s) / ratio for every s },
///
/// solved by filling states in increasing value order (smallest index first
/// among ties) up to the per-state cap until total mass 1. States with
/// p(s) = 0 have cap 0.
inline DualSolution bounded_ratio_expectation(const numvec& v, const numvec& p, prec_t ratio) {
    detail::check_value_vector(v);
    detail::check_nominal_row(p, v, /*allow_zero_row=*/false);
    if (ratio <= 0.0 || ratio > 1.0)
        throw std::invalid_argument("ratio parameter must lie in (0,1]");

    const sizvec asc = sort_indices(v);
    numvec q(p.size(), 0.0);
    prec_t filled = 0.0;
    prec_t value = 0.0;
    for (std::size_t i : asc) {
        if (filled >= 1.0) break;
        const prec_t cap = p[i] / ratio;
        const prec_t take = std::min(cap, 1.0 - filled);
        if (take <= 0.0) continue;
        q[i] = take;
        filled += take;
        value += take * v[i];
    }

    DualSolution sol;
    sol.value = value;
    sol.worst_case_distribution = std::move(q);
    return sol;
}

} // namespace robustrl
