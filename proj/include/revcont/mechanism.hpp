#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "revcont/valuation.hpp"

namespace revcont {

/// One priced option on the menu: allocation probabilities per good plus a
/// price. The allocation must live in the menu's allocation space.
struct MenuEntry {
    std::vector<double> q;
    double s = 0.0;
};

/// Menu form of an IC/IR mechanism: the buyer picks a utility-maximizing
/// entry. Additive and unit-demand menus carry an implicit free null entry
/// (q = 0, s = 0); implementation menus do not (an outcome must be chosen).
struct Menu {
    std::vector<MenuEntry> entries;
    AllocationSpace space;
    bool has_null = true;
};

inline bool allocation_in_space(const AllocationSpace& space, std::span<const double> q,
                                double tol = 1e-9) {
    if (static_cast<int>(q.size()) != space.k) return false;
    double sum = 0.0;
    for (double v : q) {
        if (v < -tol || v > 1.0 + tol) return false;
        sum += v;
    }
    if (space.kind == SpaceKind::unit_demand && sum > 1.0 + tol) return false;
    if (space.kind == SpaceKind::implementation && std::abs(sum - 1.0) > tol) return false;
    return true;
}

/// Builds a menu, checking each entry against the space and rejecting
/// negative prices (the null entry provides IR).
inline Menu make_menu(std::vector<MenuEntry> entries, AllocationSpace space) {
    for (const auto& e : entries) {
        if (!allocation_in_space(space, e.q))
            throw std::invalid_argument("menu entry allocation outside the allocation space");
        if (e.s < 0.0) throw std::invalid_argument("negative menu price");
    }
    Menu menu;
    menu.entries = std::move(entries);
    menu.space = space;
    menu.has_null = space.kind != SpaceKind::implementation;
    return menu;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Buyer's choice at type x. entry == -1 means the null entry. Ties go to the
/// seller: larger payment first, then lower entry index, with the null entry
/// ranked last. A tie is any utility within a small relative window of the
/// maximum; vertex menus from the LP bind their IC/IR rows exactly, so an
/// exact comparison would let float dust pick the buyer-favorable side.
struct BestResponse {
    std::ptrdiff_t entry = -1;
    double utility = 0.0;
    double payment = 0.0;
};

inline BestResponse best_response(const Menu& menu, const ValuationPoint& x) {
    if (!menu.has_null && menu.entries.empty())
        throw std::invalid_argument("implementation menu with no entries");
    if (!menu.entries.empty() && menu.entries.front().q.size() != x.size())
        throw std::invalid_argument("type dimension does not match menu");

    const std::size_t n = menu.entries.size();
    std::vector<double> utility(n);
    double best_u = menu.has_null ? 0.0 : -std::numeric_limits<double>::infinity();
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = menu.entries[i];
        const double value = dot(e.q, x);
        utility[i] = value - e.s;
        best_u = std::max(best_u, utility[i]);
        scale = std::max(scale, std::abs(value) + std::abs(e.s));
    }
    const double window = 1e-10 * scale;

    BestResponse best{-1, 0.0, 0.0};
    bool have = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (utility[i] < best_u - window) continue;
        if (!have || menu.entries[i].s > best.payment + 0.0) {
            best = {static_cast<std::ptrdiff_t>(i), utility[i], menu.entries[i].s};
            have = true;
        }
    }
    if (menu.has_null && (!have || (0.0 >= best_u - window && best.payment < 0.0)))
        best = {-1, 0.0, 0.0};
    return best;
}

inline std::vector<double> allocation_of(const Menu& menu, const BestResponse& br) {
    if (br.entry < 0) return std::vector<double>(menu.space.k, 0.0);
    return menu.entries[static_cast<std::size_t>(br.entry)].q;
}

/// R(menu; d) = expected payment under best response.
inline double revenue(const Menu& menu, const DiscreteValuation& d) {
    double total = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (d.probs[j] == 0.0) continue;
        total += d.probs[j] * best_response(menu, d.support[j]).payment;
    }
    return total;
}

/// The lambda-rescaled mechanism: prices scaled by lambda, allocations kept.
/// In direct form this realizes q'(x) = q(x/lambda), s'(x) = lambda*s(x/lambda).
inline Menu rescale(const Menu& menu, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("rescale factor must be positive");
    Menu out = menu;
    for (auto& e : out.entries) e.s *= lambda;
    return out;
}

/// The eta-discounted mechanism: every price multiplied by 1 - eta.
inline Menu discount(const Menu& menu, double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("discount rate must be in (0,1)");
    return rescale(menu, 1.0 - eta);
}

/// Pointwise payment bound for IC mechanisms:
///   s(x) <= s(lambda*y) + lambda/(lambda-1) * rho(x - y),
/// with rho the dual seminorm of the menu's space.
struct Lemma1Report {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool holds = false;
};

inline Lemma1Report verify_lemma1(const Menu& menu, const ValuationPoint& x,
                                  const ValuationPoint& y, double lambda,
                                  double tol = 1e-9) {
    if (!(lambda > 1.0)) throw std::invalid_argument("lemma 1 needs lambda > 1");
    ValuationPoint ly(y.size());
    std::vector<double> diff(x.size());
    for (std::size_t i = 0; i < y.size(); ++i) ly[i] = lambda * y[i];
    for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - y[i];

    Lemma1Report rep;
    rep.lhs = best_response(menu, x).payment;
    rep.rhs = best_response(menu, ly).payment +
              lambda / (lambda - 1.0) * gamma_seminorm(menu.space.kind, diff);
    rep.slack = rep.rhs - rep.lhs;
    rep.holds = rep.slack >= -tol;
    return rep;
}

/// Explicit direct mechanism restricted to a finite list of types. Unlike a
/// Menu, nothing here is IC/IR by construction — check_ic_ir verifies it.
struct DirectMechanismTable {
    std::vector<ValuationPoint> types;
    std::vector<std::vector<double>> allocations;
    std::vector<double> payments;

    std::size_t size() const { return types.size(); }
};

inline DirectMechanismTable induced_table(const Menu& menu,
                                          const std::vector<ValuationPoint>& types) {
    DirectMechanismTable t;
    for (const auto& x : types) {
        const auto br = best_response(menu, x);
        t.types.push_back(x);
        t.allocations.push_back(allocation_of(menu, br));
        t.payments.push_back(br.payment);
    }
    return t;
}

struct IcIrReport {
    std::vector<std::pair<std::size_t, std::size_t>> ic_violations;  // (j envies l)
    std::vector<std::size_t> ir_violations;
    bool ok() const { return ic_violations.empty() && ir_violations.empty(); }
};

inline IcIrReport check_ic_ir(const DirectMechanismTable& t, double tol = 1e-9) {
    IcIrReport rep;
    for (std::size_t j = 0; j < t.size(); ++j) {
        const double own = dot(t.allocations[j], t.types[j]) - t.payments[j];
        if (own < -tol) rep.ir_violations.push_back(j);
        for (std::size_t l = 0; l < t.size(); ++l) {
            if (l == j) continue;
            const double other = dot(t.allocations[l], t.types[j]) - t.payments[l];
            if (own < other - tol) rep.ic_violations.emplace_back(j, l);
        }
    }
    return rep;
}

/// Selling the k goods separately at the given prices: one entry per subset,
/// priced at the sum of its members' prices.
inline Menu separate_menu(const std::vector<double>& prices) {
    const std::size_t k = prices.size();
    if (k == 0 || k > 16) throw std::invalid_argument("separate_menu needs 1 <= k <= 16 goods");
    for (double p : prices)
        if (p < 0.0) throw std::invalid_argument("negative price");
    std::vector<MenuEntry> entries;
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        MenuEntry e;
        e.q.assign(k, 0.0);
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (std::size_t{1} << i)) {
                e.q[i] = 1.0;
                e.s += prices[i];
            }
        entries.push_back(std::move(e));
    }
    return make_menu(std::move(entries), {SpaceKind::additive, static_cast<int>(k)});
}

/// Selling everything as one grand bundle at a single price.
inline Menu bundle_menu(int k, double price) {
    if (k < 1) throw std::invalid_argument("bundle_menu needs k >= 1");
    if (price < 0.0) throw std::invalid_argument("negative price");
    MenuEntry e;
    e.q.assign(static_cast<std::size_t>(k), 1.0);
    e.s = price;
    return make_menu({std::move(e)}, {SpaceKind::additive, k});
}

inline bool is_deterministic(const Menu& menu, double tol = 1e-9) {
    for (const auto& e : menu.entries)
        for (double v : e.q)
            if (std::min(std::abs(v), std::abs(v - 1.0)) > tol) return false;
    return true;
}

/// Number of non-null entries (explicit zero entries are not counted).
inline std::size_t menu_size(const Menu& menu) {
    std::size_t n = 0;
    for (const auto& e : menu.entries) {
        const bool null_entry =
            e.s == 0.0 && std::all_of(e.q.begin(), e.q.end(), [](double v) { return v == 0.0; });
        if (!null_entry) ++n;
    }
    return n;
}

}  // namespace revcont
