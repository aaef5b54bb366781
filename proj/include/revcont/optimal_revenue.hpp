#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "revcont/mechanism.hpp"
#include "revcont/simplex.hpp"
#include "revcont/valuation.hpp"

namespace revcont {

enum class SolveStatus { optimal, infeasible_input, numeric_warning };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible_input: return "infeasible_input";
        case SolveStatus::numeric_warning: return "numeric_warning";
    }
    return "?";
}

/// Output of the revenue LP: the optimal menu (one entry per support point,
/// deduplicated, the null entry implicit), its value, and the duality
/// certificate backing optimality.
struct OptimalMechanismResult {
    Menu menu;
    double value = 0.0;
    SolveStatus status = SolveStatus::optimal;
    double dual_gap = 0.0;
    double dual_infeasibility = 0.0;
    double primal_residual = 0.0;
    long iterations = 0;
    std::vector<double> dual;  // LP row multipliers, for inspection
};

namespace detail {

// Variables are laid out per support point: k allocation coordinates, then
// the price. Every ordered pair gets an IC row; the allocation space
// contributes its linear rows per point. IR differs by space: additive and
// unit demand have the free null option, so IR is the plain u_j >= 0 row.
// Implementation mechanisms cannot opt out; their IR baseline is a zero-price
// entry q0 in the simplex (extra variables), and u_j >= q0 . x_j replaces the
// plain row. That matches IR on all of R+^k for menu mechanisms and keeps the
// class closed under rescaling, which the continuity theorems need.
inline LinearProgram revenue_lp(const DiscreteValuation& d, const AllocationSpace& space) {
    const int n = static_cast<int>(d.size());
    const int k = d.k;
    const int vars_per_point = k + 1;
    const bool baseline = space.kind == SpaceKind::implementation;
    LinearProgram lp(n * vars_per_point + (baseline ? k : 0));

    auto q_var = [&](int j, int i) { return j * vars_per_point + i; };
    auto s_var = [&](int j) { return j * vars_per_point + k; };
    auto q0_var = [&](int i) { return n * vars_per_point + i; };

    // Zero-probability points keep their constraints but carry no weight.
    for (int j = 0; j < n; ++j) lp.objective[s_var(j)] = d.probs[j];

    for (int j = 0; j < n; ++j) {
        const auto& x = d.support[j];
        // IC: q_l . x_j - s_l - q_j . x_j + s_j <= 0 for every l != j.
        for (int l = 0; l < n; ++l) {
            if (l == j) continue;
            std::vector<double> row(lp.num_vars, 0.0);
            for (int i = 0; i < k; ++i) {
                row[q_var(l, i)] += x[i];
                row[q_var(j, i)] -= x[i];
            }
            row[s_var(l)] -= 1.0;
            row[s_var(j)] += 1.0;
            lp.add_row(std::move(row), RowSense::le, 0.0);
        }
        // IR: s_j - q_j . x_j <= -q0 . x_j (q0 identically 0 without baseline).
        std::vector<double> ir(lp.num_vars, 0.0);
        for (int i = 0; i < k; ++i) ir[q_var(j, i)] = -x[i];
        ir[s_var(j)] = 1.0;
        if (baseline)
            for (int i = 0; i < k; ++i) ir[q0_var(i)] = x[i];
        lp.add_row(std::move(ir), RowSense::le, 0.0);

        switch (space.kind) {
            case SpaceKind::additive:
                for (int i = 0; i < k; ++i) {
                    std::vector<double> row(lp.num_vars, 0.0);
                    row[q_var(j, i)] = 1.0;
                    lp.add_row(std::move(row), RowSense::le, 1.0);
                }
                break;
            case SpaceKind::unit_demand: {
                std::vector<double> row(lp.num_vars, 0.0);
                for (int i = 0; i < k; ++i) row[q_var(j, i)] = 1.0;
                lp.add_row(std::move(row), RowSense::le, 1.0);
                break;
            }
            case SpaceKind::implementation: {
                std::vector<double> row(lp.num_vars, 0.0);
                for (int i = 0; i < k; ++i) row[q_var(j, i)] = 1.0;
                lp.add_row(std::move(row), RowSense::eq, 1.0);
                break;
            }
        }
    }
    if (baseline) {
        std::vector<double> row(lp.num_vars, 0.0);
        for (int i = 0; i < k; ++i) row[q0_var(i)] = 1.0;
        lp.add_row(std::move(row), RowSense::eq, 1.0);
    }
    return lp;
}

}  // namespace detail

/// Rev(d) on the given allocation space, computed exactly (to LP tolerance)
/// as the IC/IR linear program over the support. Prices are nonnegative
/// variables; for a single buyer this loses no revenue since negative-price
/// entries can always be dropped.
inline OptimalMechanismResult optimal_rev_lp(const DiscreteValuation& d,
                                             AllocationSpace space) {
    if (space.k != d.k) throw std::invalid_argument("allocation space dimension mismatch");
    const auto lp = detail::revenue_lp(d, space);
    const auto sol = solve_lp(lp);

    OptimalMechanismResult out;
    out.iterations = sol.iterations;
    out.dual = sol.certificate.dual;
    out.dual_gap = sol.certificate.gap;
    out.dual_infeasibility = sol.certificate.dual_infeasibility;
    out.primal_residual = sol.certificate.primal_residual;

    switch (sol.status) {
        case LpStatus::optimal: out.status = SolveStatus::optimal; break;
        case LpStatus::infeasible: out.status = SolveStatus::infeasible_input; return out;
        default: out.status = SolveStatus::numeric_warning; break;
    }
    // Prices are nonnegative variables, so the objective is >= 0; anything
    // below is refresh dust.
    out.value = std::max(0.0, sol.value);

    const int k = d.k;
    std::vector<MenuEntry> entries;
    auto push_unique = [&](MenuEntry e) {
        const bool dup = std::any_of(entries.begin(), entries.end(), [&](const MenuEntry& o) {
            if (std::abs(o.s - e.s) > 1e-12) return false;
            for (int i = 0; i < k; ++i)
                if (std::abs(o.q[i] - e.q[i]) > 1e-12) return false;
            return true;
        });
        if (!dup) entries.push_back(std::move(e));
    };
    for (std::size_t j = 0; j < d.size(); ++j) {
        MenuEntry e;
        e.q.assign(sol.x.begin() + static_cast<std::ptrdiff_t>(j) * (k + 1),
                   sol.x.begin() + static_cast<std::ptrdiff_t>(j) * (k + 1) + k);
        for (double& v : e.q) v = std::clamp(v, 0.0, 1.0);
        e.s = std::max(0.0, sol.x[j * (k + 1) + k]);
        push_unique(std::move(e));
    }
    if (space.kind == SpaceKind::implementation) {
        // The zero-price baseline entry is part of the mechanism: it is the
        // IR anchor when there is no way to opt out.
        MenuEntry base;
        base.q.assign(sol.x.begin() + static_cast<std::ptrdiff_t>(d.size()) * (k + 1),
                      sol.x.begin() + static_cast<std::ptrdiff_t>(d.size()) * (k + 1) + k);
        for (double& v : base.q) v = std::clamp(v, 0.0, 1.0);
        base.s = 0.0;
        push_unique(std::move(base));
    }
    out.menu = make_menu(std::move(entries), space);
    return out;
}

/// One-good optimal revenue (posted price): maximizes t * P[X >= t] over the
/// support values, which suffices since the objective only drops between
/// support points. Ties resolve to the lowest optimal price.
inline std::pair<double, double> myerson_one_good(const DiscreteValuation& d) {
    if (d.k != 1) throw std::invalid_argument("myerson_one_good needs a one-good valuation");
    std::vector<std::pair<double, double>> pts(d.size());
    for (std::size_t j = 0; j < d.size(); ++j) pts[j] = {d.support[j][0], d.probs[j]};
    std::sort(pts.begin(), pts.end());

    double best_price = pts.front().first, best_value = 0.0;
    double tail = 0.0;
    for (std::size_t j = pts.size(); j-- > 0;) {
        tail += pts[j].second;
        const double value = pts[j].first * tail;
        if (value > best_value || (value == best_value && pts[j].first < best_price)) {
            best_value = value;
            best_price = pts[j].first;
        }
    }
    return {best_price, best_value};
}

/// Marginal distribution of one good.
inline DiscreteValuation marginal(const DiscreteValuation& d, int good) {
    if (good < 0 || good >= d.k) throw std::invalid_argument("good index out of range");
    std::vector<ValuationPoint> support;
    std::vector<double> probs;
    for (std::size_t j = 0; j < d.size(); ++j) {
        support.push_back({d.support[j][static_cast<std::size_t>(good)]});
        probs.push_back(d.probs[j]);
    }
    return validate(std::move(support), std::move(probs));
}

/// Distribution of ||X||_1 (the grand-bundle value).
inline DiscreteValuation bundle_value_distribution(const DiscreteValuation& d) {
    std::vector<ValuationPoint> support;
    std::vector<double> probs;
    for (std::size_t j = 0; j < d.size(); ++j) {
        support.push_back({l1_norm(d.support[j])});
        probs.push_back(d.probs[j]);
    }
    return validate(std::move(support), std::move(probs));
}

/// Best separate-prices revenue: per-good Myerson prices. Decisions decompose
/// good by good under additive utilities, so this is exact for any coupling
/// of the goods, not just product distributions.
inline double srev(const DiscreteValuation& d) {
    double total = 0.0;
    for (int i = 0; i < d.k; ++i) total += myerson_one_good(marginal(d, i)).second;
    return total;
}

/// Optimal separate prices, one per good.
inline std::vector<double> srev_prices(const DiscreteValuation& d) {
    std::vector<double> prices;
    for (int i = 0; i < d.k; ++i) prices.push_back(myerson_one_good(marginal(d, i)).first);
    return prices;
}

/// Best grand-bundle revenue.
inline double brev(const DiscreteValuation& d) {
    return myerson_one_good(bundle_value_distribution(d)).second;
}

inline double brev_price(const DiscreteValuation& d) {
    return myerson_one_good(bundle_value_distribution(d)).first;
}

/// Exact deterministic-mechanism optimum for tiny instances: enumerate every
/// assignment of support points to the 2^k subset allocations, then solve the
/// induced LP in the entry prices (same allocation implies same price under
/// IC). Infeasible assignments are skipped.
inline double drev_bruteforce(const DiscreteValuation& d) {
    const int k = d.k;
    const int n = static_cast<int>(d.size());
    if (k > 2 || n > 6) throw std::invalid_argument("drev_bruteforce limits: k <= 2, n <= 6");

    const int num_allocs = 1 << k;
    std::vector<std::vector<double>> alloc(num_allocs, std::vector<double>(k, 0.0));
    for (int a = 0; a < num_allocs; ++a)
        for (int i = 0; i < k; ++i)
            if (a & (1 << i)) alloc[a][static_cast<std::size_t>(i)] = 1.0;

    double best = 0.0;
    std::vector<int> assign(static_cast<std::size_t>(n), 0);
    long total = 1;
    for (int j = 0; j < n; ++j) total *= num_allocs;
    for (long code = 0; code < total; ++code) {
        long c = code;
        for (int j = 0; j < n; ++j) {
            assign[static_cast<std::size_t>(j)] = static_cast<int>(c % num_allocs);
            c /= num_allocs;
        }
        // Price variables for the distinct allocations in use; the empty
        // allocation always participates with price fixed at 0.
        std::vector<int> used;
        std::vector<int> var_of(static_cast<std::size_t>(num_allocs), -1);
        for (int a : assign)
            if (a != 0 && var_of[static_cast<std::size_t>(a)] < 0) {
                var_of[static_cast<std::size_t>(a)] = static_cast<int>(used.size());
                used.push_back(a);
            }

        LinearProgram lp(static_cast<int>(used.size()));
        for (int j = 0; j < n; ++j) {
            const int own = assign[static_cast<std::size_t>(j)];
            if (own != 0) lp.objective[var_of[static_cast<std::size_t>(own)]] += d.probs[j];
            const double own_value = dot(alloc[own], d.support[j]);
            // IC against every menu entry including the null one (IC against
            // null is exactly IR):  s_own - s_other <= q_own.x - q_other.x.
            for (std::size_t t = 0; t <= used.size(); ++t) {
                const int other = (t == used.size()) ? 0 : used[t];
                if (other == own) continue;
                const double other_value = dot(alloc[other], d.support[j]);
                std::vector<double> row(lp.num_vars, 0.0);
                if (own != 0) row[var_of[static_cast<std::size_t>(own)]] = 1.0;
                if (other != 0) row[var_of[static_cast<std::size_t>(other)]] = -1.0;
                lp.add_row(std::move(row), RowSense::le, own_value - other_value);
            }
        }
        const auto sol = solve_lp(lp);
        if (sol.status == LpStatus::optimal) best = std::max(best, sol.value);
    }
    return best;
}

/// Revenue of one concrete class member on d — the evaluation half of
/// class-restricted revenue (lower-bounds N-Rev).
inline double class_rev_check(const Menu& menu, const DiscreteValuation& d) {
    return revenue(menu, d);
}

}  // namespace revcont
