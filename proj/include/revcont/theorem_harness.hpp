#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "revcont/mechanism.hpp"
#include "revcont/optimal_revenue.hpp"
#include "revcont/rng.hpp"
#include "revcont/transport.hpp"
#include "revcont/valuation.hpp"

namespace revcont {

/// Default absolute tolerance on bound slacks: 10x the LP gap tolerance, so
/// solver noise never reads as a theorem violation.
inline constexpr double kReportTol = 1e-6;

/// One verified inequality: holds iff rhs - lhs >= -tolerance. Checks that do
/// not apply to an instance (e.g. a bound whose precondition fails by design)
/// come back with skipped = true and vacuously hold.
struct BoundReport {
    std::string suite;
    std::string digest;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    double tolerance = kReportTol;
    bool holds = true;
    bool skipped = false;
};

inline BoundReport make_report(std::string suite, std::string digest, double lhs, double rhs,
                               double tol) {
    BoundReport r;
    r.suite = std::move(suite);
    r.digest = std::move(digest);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.tolerance = tol;
    r.holds = r.slack >= -tol;
    return r;
}

inline BoundReport skipped_report(std::string suite, std::string digest) {
    BoundReport r;
    r.suite = std::move(suite);
    r.digest = std::move(digest) + ";skipped";
    r.skipped = true;
    return r;
}

// ---------------------------------------------------------------------------
// Square-root continuity and its corollaries
// ---------------------------------------------------------------------------

/// |sqrt Rev(X) - sqrt Rev(Y)| <= sqrt W(X,Y), on any of the three allocation
/// spaces (revenue and coupling cost both use the space).
inline BoundReport check_sqrt_bound(const DiscreteValuation& dx, const DiscreteValuation& dy,
                                    SpaceKind space = SpaceKind::additive,
                                    double tol = kReportTol, std::string digest = "") {
    const AllocationSpace sp{space, dx.k};
    const double rx = optimal_rev_lp(dx, sp).value;
    const double ry = optimal_rev_lp(dy, sp).value;
    const double w = wasserstein_gamma(dx, dy, space).value;
    return make_report("sqrt", std::move(digest), std::abs(std::sqrt(rx) - std::sqrt(ry)),
                       std::sqrt(w), tol);
}

/// Rev(X) <= lambda Rev(Y) + lambda/(lambda-1) W(X,Y). When Rev(Y) and W are
/// both positive, also verifies that the minimizing lambda* reproduces
/// (sqrt Rev(Y) + sqrt W)^2 to 1e-9; a failure of that identity fails the
/// report.
inline BoundReport check_lambda_bound(const DiscreteValuation& dx, const DiscreteValuation& dy,
                                      double lambda, double tol = kReportTol,
                                      std::string digest = "") {
    if (!(lambda > 1.0)) throw std::invalid_argument("lambda bound needs lambda > 1");
    const AllocationSpace sp{SpaceKind::additive, dx.k};
    const double rx = optimal_rev_lp(dx, sp).value;
    const double ry = optimal_rev_lp(dy, sp).value;
    const double w = wasserstein(dx, dy).value;

    auto rep = make_report("lambda", std::move(digest), rx,
                           lambda * ry + lambda / (lambda - 1.0) * w, tol);
    if (ry > 0.0 && w > 0.0) {
        const double lstar = 1.0 + std::sqrt(w / ry);
        const double at_lstar = lstar * ry + lstar / (lstar - 1.0) * w;
        const double closed_form = (std::sqrt(ry) + std::sqrt(w)) * (std::sqrt(ry) + std::sqrt(w));
        if (std::abs(at_lstar - closed_form) > 1e-9 * std::max(1.0, closed_form)) {
            rep.holds = false;
            rep.digest += ";lambda_star_identity_failed";
        }
    }
    return rep;
}

/// Corollary bounds on |Rev(X) - Rev(Y)|:
///   first:  2 sqrt(M W) + W with M = min(Rev(X), Rev(Y));
///   second: 2 sqrt(M W) - W with M = max(...), applicable only when W <= M
///           (otherwise it carries no information and is skipped).
inline std::pair<BoundReport, BoundReport> check_corollary_bounds(
    const DiscreteValuation& dx, const DiscreteValuation& dy, double tol = kReportTol,
    std::string digest = "") {
    const AllocationSpace sp{SpaceKind::additive, dx.k};
    const double rx = optimal_rev_lp(dx, sp).value;
    const double ry = optimal_rev_lp(dy, sp).value;
    const double w = wasserstein(dx, dy).value;
    const double diff = std::abs(rx - ry);

    const double m_min = std::min(rx, ry);
    auto first = make_report("corollary_min", digest, diff,
                             2.0 * std::sqrt(m_min * w) + w, tol);

    const double m_max = std::max(rx, ry);
    BoundReport second;
    if (w <= m_max)
        second = make_report("corollary_max", digest, diff, 2.0 * std::sqrt(m_max * w) - w, tol);
    else
        second = skipped_report("corollary_max", digest);
    return {std::move(first), std::move(second)};
}

// ---------------------------------------------------------------------------
// Discounting guarantees
// ---------------------------------------------------------------------------

/// The (delta, eta) pair of the discounting theorem: delta = eps^2 / (4M),
/// eta = eps / (2M). Requires 0 < eps < 2M, which keeps eta < 1.
inline std::pair<double, double> theorem_c_params(double eps, double m) {
    if (!(eps > 0.0) || !(m > 0.0)) throw std::invalid_argument("eps and M must be positive");
    if (!(eps < 2.0 * m)) throw std::invalid_argument("theorem C needs eps < 2M");
    return {eps * eps / (4.0 * m), eps / (2.0 * m)};
}

struct TheoremCReports {
    BoundReport eps_bound;      // R(mu_{1-eta}; Y) >= R(mu; X) - eps
    BoundReport eta_bound;      // ... >= R(mu; X) - (2 sqrt(M delta) - delta)
    BoundReport two_eps_bound;  // ... >= Rev(Y) - 2 eps, when mu is optimal for X
};

/// Checks the discounting theorem on a concrete instance. Preconditions are
/// verified by computation and violations throw with the failed condition
/// named: W(X,Y) <= delta and R(mu;X) <= M. The 2eps-optimality report is
/// emitted when mu's revenue on X matches the LP optimum (and skipped
/// otherwise).
inline TheoremCReports check_theorem_c(const DiscreteValuation& dx, const DiscreteValuation& dy,
                                       const Menu& mu, double eps, double m,
                                       double tol = kReportTol, std::string digest = "") {
    const auto [delta, eta] = theorem_c_params(eps, m);
    const double w = wasserstein(dx, dy).value;
    if (w > delta + 1e-12)
        throw std::invalid_argument("theorem C precondition violated: W(X,Y) > delta");
    const double r_mu_x = revenue(mu, dx);
    if (r_mu_x > m + 1e-9)
        throw std::invalid_argument("theorem C precondition violated: R(mu;X) > M");

    const Menu discounted = discount(mu, eta);
    const double achieved = revenue(discounted, dy);

    TheoremCReports out;
    out.eps_bound = make_report("theorem_c_eps", digest, r_mu_x - eps, achieved, tol);
    out.eta_bound = make_report("theorem_c_eta", digest,
                                r_mu_x - (2.0 * std::sqrt(m * delta) - delta), achieved, tol);

    const AllocationSpace sp{SpaceKind::additive, dx.k};
    const double rev_x = optimal_rev_lp(dx, sp).value;
    if (std::abs(r_mu_x - rev_x) <= 1e-6 * std::max(1.0, rev_x)) {
        const double rev_y = optimal_rev_lp(dy, sp).value;
        out.two_eps_bound =
            make_report("theorem_c_2eps", digest, rev_y - 2.0 * eps, achieved, tol);
    } else {
        out.two_eps_bound = skipped_report("theorem_c_2eps", digest);
    }
    return out;
}

/// Multiplicative variant (no revenue bound M needed):
///   R(mu_{1-eps}; Y) >= (1-eps) R(mu; X) - eps  whenever W <= eps^2/(1-eps).
inline BoundReport check_multiplicative(const DiscreteValuation& dx, const DiscreteValuation& dy,
                                        const Menu& mu, double eps, double tol = kReportTol,
                                        std::string digest = "") {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
    const double delta = eps * eps / (1.0 - eps);
    const double w = wasserstein(dx, dy).value;
    if (w > delta + 1e-12)
        throw std::invalid_argument("multiplicative bound precondition violated: W(X,Y) > eps^2/(1-eps)");
    const double achieved = revenue(discount(mu, eps), dy);
    return make_report("remark_b", std::move(digest),
                       (1.0 - eps) * revenue(mu, dx) - eps, achieved, tol);
}

/// Square-root form of the discount guarantee:
///   sqrt R(mu_{1-eta}; Y) >= sqrt R(mu; X) - sqrt W,  eta = sqrt(W / R(mu;X)).
/// Skipped when W >= R(mu;X) (trivially satisfied); at W = 0 the discount rate
/// is pinned to 1e-9 since eta must stay inside (0,1).
inline BoundReport check_remark_e(const DiscreteValuation& dx, const DiscreteValuation& dy,
                                  const Menu& mu, double tol = kReportTol,
                                  std::string digest = "") {
    const double r = revenue(mu, dx);
    const double w = wasserstein(dx, dy).value;
    if (!(w < r)) return skipped_report("remark_e", std::move(digest));
    const double eta = w > 0.0 ? std::sqrt(w / r) : 1e-9;
    const double achieved = revenue(discount(mu, eta), dy);
    return make_report("remark_e", std::move(digest), std::sqrt(r) - std::sqrt(w),
                       std::sqrt(achieved), tol);
}

/// Rev(lambda X) = lambda Rev(X), checked through two LP solves.
inline BoundReport check_rescale_identity(const DiscreteValuation& d, double lambda,
                                          std::string digest = "") {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    const AllocationSpace sp{SpaceKind::additive, d.k};
    const double base = optimal_rev_lp(d, sp).value;
    const double scaled = optimal_rev_lp(scale(d, lambda), sp).value;
    // |Rev(lambda X) - lambda Rev(X)| <= 1e-6 * max(1, lambda), with the
    // tolerance carried in rhs so it is not counted twice.
    return make_report("rescale", std::move(digest), std::abs(scaled - lambda * base),
                       1e-6 * std::max(1.0, lambda), 0.0);
}

// ---------------------------------------------------------------------------
// Convergence and learning
// ---------------------------------------------------------------------------

enum class ConvergenceMode { perturbation, sampling };

/// Theorem B at desk scale: builds a sequence X_n approaching the target (by
/// shrinking perturbations — grid rounding or noise — or growing samples) and
/// checks the corollary bound |Rev(X_n) - Rev(X)| <= 2 sqrt(M W_n) + W_n with
/// M = min of the revenues.
inline std::vector<BoundReport> convergence_experiment(
    const DiscreteValuation& target, ConvergenceMode mode, const std::vector<double>& schedule,
    std::uint64_t seed, double tol = kReportTol,
    PerturbMode perturb_mode = PerturbMode::seeded_noise) {
    const AllocationSpace sp{SpaceKind::additive, target.k};
    const double rev_target = optimal_rev_lp(target, sp).value;
    std::vector<BoundReport> out;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        DiscreteValuation xn =
            mode == ConvergenceMode::perturbation
                ? perturb(target, schedule[i], perturb_mode, seed + i)
                : sample(target, static_cast<std::size_t>(schedule[i]), seed + i);
        const double w = wasserstein(xn, target).value;
        const double rev_n = optimal_rev_lp(xn, sp).value;
        const double m = std::min(rev_n, rev_target);
        char digest[96];
        std::snprintf(digest, sizeof digest, "step=%zu;param=%.6g;w=%.6g", i, schedule[i], w);
        out.push_back(make_report("convergence", digest, std::abs(rev_n - rev_target),
                                  2.0 * std::sqrt(m * w) + w, tol));
    }
    return out;
}

/// Outcome of one sample-then-discount run against a known target.
struct LearningReport {
    std::size_t n = 0;
    double rev_target = 0.0;    // Rev(Y), by LP
    double rev_achieved = 0.0;  // R(mu_{1-eta}; Y)
    double eta = 0.0;
    double delta_budget = 0.0;  // Wasserstein budget the guarantee needs
    double realized_w = 0.0;    // actual W(empirical, Y)
    bool budget_met = false;
    double regret = 0.0;        // rev_target - rev_achieved
};

/// The learning pipeline: sample n points from the target, solve the LP on
/// the empirical distribution, discount by eta, evaluate back on the target.
/// M comes from the target-side bound M = (sqrt(E||Y||_1) + sqrt(eps/2))^2,
/// which dominates R(mu;X) whenever the Wasserstein budget is met. The
/// guarantee regret <= 2 eps is conditional on budget_met; the report
/// measures that event rather than assuming it.
inline LearningReport learn_pipeline(const DiscreteValuation& dy, std::size_t n, double eps,
                                     std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample size must be at least 1");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    const double my = expected_l1(dy);
    double m = (std::sqrt(my) + std::sqrt(eps / 2.0)) * (std::sqrt(my) + std::sqrt(eps / 2.0));
    // A larger M is always a valid revenue bound; lift degenerate targets
    // (E||Y||_1 near 0) over the eps < 2M requirement.
    if (!(eps < 2.0 * m)) m = eps;
    const auto [delta, eta] = theorem_c_params(eps, m);

    const DiscreteValuation empirical = sample(dy, n, seed);
    const AllocationSpace sp{SpaceKind::additive, dy.k};
    const Menu mu = optimal_rev_lp(empirical, sp).menu;
    const Menu discounted = discount(mu, eta);

    LearningReport rep;
    rep.n = n;
    rep.eta = eta;
    rep.delta_budget = delta;
    rep.realized_w = wasserstein(empirical, dy).value;
    rep.budget_met = rep.realized_w <= delta;
    rep.rev_target = optimal_rev_lp(dy, sp).value;
    rep.rev_achieved = revenue(discounted, dy);
    rep.regret = rep.rev_target - rep.rev_achieved;
    return rep;
}

// ---------------------------------------------------------------------------
// Canned sharp instances
// ---------------------------------------------------------------------------

/// A named (X, Y) pair with its analytically known revenue and distance.
struct SharpExample {
    std::string name;
    DiscreteValuation x, y;
    double rev_x = 0.0, rev_y = 0.0, w = 0.0;
};

/// The paper-level worked examples, parameterized:
///   sharp_equality — X == c, Y == 0: the equality case of the sqrt bound.
///   prohorov_gap   — X = {M w.p. 1/M, 0 else}, Y == 0: Prohorov-close,
///                    revenue 1 vs 0 apart.
///   no_lipschitz   — X == 1 vs Y = {1-eps w.p. eps, 1 w.p. 1-eps}: revenue
///                    gap eps with W only eps^2.
///   sqrt_gap       — X == M^4 + 2M vs Y == M^4: revenue gap 2M while the
///                    sqrt gap stays below 1/M.
inline std::vector<SharpExample> sharp_examples(double m = 100.0, double eps = 0.1,
                                                double c = 4.0) {
    if (!(m > 1.0) || !(eps > 0.0 && eps < 1.0) || !(c > 0.0))
        throw std::invalid_argument("sharp_examples needs M > 1, eps in (0,1), c > 0");
    std::vector<SharpExample> out;

    out.push_back({"sharp_equality", point_mass({c}), point_mass({0.0}), c, 0.0, c});
    out.push_back({"prohorov_gap",
                   validate({{m}, {0.0}}, {1.0 / m, 1.0 - 1.0 / m}),
                   point_mass({0.0}), 1.0, 0.0, 1.0});
    out.push_back({"no_lipschitz", point_mass({1.0}),
                   validate({{1.0 - eps}, {1.0}}, {eps, 1.0 - eps}), 1.0, 1.0 - eps,
                   eps * eps});
    const double m4 = m * m * m * m;
    out.push_back({"sqrt_gap", point_mass({m4 + 2.0 * m}), point_mass({m4}), m4 + 2.0 * m,
                   m4, 2.0 * m});
    return out;
}

// ---------------------------------------------------------------------------
// Seeded fuzz corpus
// ---------------------------------------------------------------------------

struct CorpusConfig {
    int max_k = 3;
    int max_support = 8;
    double heavy_tail_prob = 0.15;
    double min_expected_l1 = 0.0;  // regenerate until E||X||_1 exceeds this
};

/// Random support point: uniform in [0,5]^k, with a heavy-tail (Pareto-like)
/// coordinate mix so both bounded and spread-out regimes get exercised.
inline ValuationPoint random_point(Rng& rng, int k, double heavy_tail_prob = 0.15) {
    ValuationPoint x(static_cast<std::size_t>(k));
    const bool heavy = rng.uniform() < heavy_tail_prob;
    for (double& v : x) {
        if (heavy)
            v = std::pow(rng.uniform_pos(), -2.0 / 3.0) - 1.0;  // tail ~ u^{-2/3}, capped by u >= 2^-53
        else
            v = rng.uniform(0.0, 5.0);
        v = std::min(v, 1e4);
    }
    return x;
}

inline DiscreteValuation random_valuation(Rng& rng, const CorpusConfig& cfg = {}) {
    for (;;) {
        const int k = rng.uniform_int(1, cfg.max_k);
        const int n = rng.uniform_int(1, cfg.max_support);
        std::vector<ValuationPoint> support;
        for (int j = 0; j < n; ++j) support.push_back(random_point(rng, k, cfg.heavy_tail_prob));
        // Dirichlet(1) probabilities via normalized exponentials.
        std::vector<double> probs(static_cast<std::size_t>(n));
        double total = 0.0;
        for (double& p : probs) {
            p = -std::log(rng.uniform_pos());
            total += p;
        }
        for (double& p : probs) p /= total;
        // The merge inside validate() can change the mass split; renormalize
        // happens there too.
        auto d = validate(std::move(support), std::move(probs));
        if (expected_l1(d) > cfg.min_expected_l1) return d;
    }
}

/// Random valuation with a prescribed dimension.
inline DiscreteValuation random_valuation_k(Rng& rng, int k, int max_support = 8,
                                            double heavy_tail_prob = 0.15) {
    const int n = rng.uniform_int(1, max_support);
    std::vector<ValuationPoint> support;
    for (int j = 0; j < n; ++j) support.push_back(random_point(rng, k, heavy_tail_prob));
    std::vector<double> probs(static_cast<std::size_t>(n));
    double total = 0.0;
    for (double& p : probs) {
        p = -std::log(rng.uniform_pos());
        total += p;
    }
    for (double& p : probs) p /= total;
    return validate(std::move(support), std::move(probs));
}

/// Random menu with 1..6 entries drawn inside the given space. Implementation
/// menus always include one zero-price entry (their IR baseline).
inline Menu random_menu(Rng& rng, AllocationSpace space) {
    const int n_entries = rng.uniform_int(1, 6);
    std::vector<MenuEntry> entries;
    for (int t = 0; t < n_entries; ++t) {
        MenuEntry e;
        e.q.assign(static_cast<std::size_t>(space.k), 0.0);
        switch (space.kind) {
            case SpaceKind::additive:
                for (double& v : e.q) v = rng.uniform();
                break;
            case SpaceKind::unit_demand: {
                double sum = 0.0;
                for (double& v : e.q) {
                    v = rng.uniform();
                    sum += v;
                }
                const double shrink = rng.uniform() / std::max(sum, 1e-12);
                if (sum > 1.0)
                    for (double& v : e.q) v *= shrink;
                break;
            }
            case SpaceKind::implementation: {
                double sum = 0.0;
                for (double& v : e.q) {
                    v = -std::log(rng.uniform_pos());
                    sum += v;
                }
                for (double& v : e.q) v /= sum;
                break;
            }
        }
        e.s = rng.uniform(0.0, 6.0);
        entries.push_back(std::move(e));
    }
    if (space.kind == SpaceKind::implementation) {
        MenuEntry base;
        base.q.assign(static_cast<std::size_t>(space.k), 0.0);
        base.q[0] = 1.0;
        base.s = 0.0;
        entries.push_back(std::move(base));
    }
    return make_menu(std::move(entries), space);
}

}  // namespace revcont
