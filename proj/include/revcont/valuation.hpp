#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "revcont/rng.hpp"

namespace revcont {

/// A buyer type: one nonnegative value per good.
using ValuationPoint = std::vector<double>;

/// Allocation space of the mechanism: which allocation vectors a menu entry
/// may use. Additive is the unconstrained unit cube; unit demand caps the
/// coordinate sum at 1; implementation forces the coordinate sum to exactly 1
/// (one of k outcomes must be chosen).
enum class SpaceKind { additive, unit_demand, implementation };

struct AllocationSpace {
    SpaceKind kind = SpaceKind::additive;
    int k = 1;
};

inline const char* to_string(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::additive: return "additive";
        case SpaceKind::unit_demand: return "unit_demand";
        case SpaceKind::implementation: return "implementation";
    }
    return "?";
}

inline SpaceKind space_kind_from_string(const std::string& s) {
    if (s == "additive") return SpaceKind::additive;
    if (s == "unit_demand") return SpaceKind::unit_demand;
    if (s == "implementation") return SpaceKind::implementation;
    throw std::invalid_argument("unknown allocation space: " + s);
}

inline double l1_norm(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += std::abs(v);
    return s;
}

inline double linf_norm(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s = std::max(s, std::abs(v));
    return s;
}

/// Dual seminorm of the allocation space: the spread of z over Gamma - Gamma.
///   additive        -> l1 norm
///   unit_demand     -> max_i z_i^+ + max_i z_i^-
///   implementation  -> max_i z_i - min_i z_i
/// The implementation seminorm has kernel span{(1,...,1)}.
inline double gamma_seminorm(SpaceKind kind, std::span<const double> z) {
    switch (kind) {
        case SpaceKind::additive:
            return l1_norm(z);
        case SpaceKind::unit_demand: {
            double plus = 0.0, minus = 0.0;
            for (double v : z) {
                plus = std::max(plus, v);
                minus = std::max(minus, -v);
            }
            return plus + minus;
        }
        case SpaceKind::implementation: {
            if (z.empty()) return 0.0;
            double hi = z[0], lo = z[0];
            for (double v : z) {
                hi = std::max(hi, v);
                lo = std::min(lo, v);
            }
            return hi - lo;
        }
    }
    return 0.0;
}

/// Finite-support probability distribution over buyer types. Always produced
/// through validate(): support points are pairwise distinct, probabilities
/// nonnegative and summing to 1 (renormalized exactly).
struct DiscreteValuation {
    int k = 0;
    std::vector<ValuationPoint> support;
    std::vector<double> probs;

    std::size_t size() const { return support.size(); }
};

/// Checks and canonicalizes raw (support, probs) data: consistent dimension,
/// nonnegative coordinates and probabilities, mass within 1e-9 of 1, exact
/// duplicate points merged (probabilities summed, first occurrence order
/// kept), then renormalized. Mass already within 1e-12 of 1 is kept bit-exact
/// so validation is a fixpoint and serialization round-trips exactly.
inline DiscreteValuation validate(std::vector<ValuationPoint> support,
                                  std::vector<double> probs) {
    if (support.empty()) throw std::invalid_argument("empty support");
    if (support.size() != probs.size())
        throw std::invalid_argument("support and probs have different lengths");
    const std::size_t k = support.front().size();
    if (k == 0) throw std::invalid_argument("zero-dimensional valuation point");
    for (const auto& x : support) {
        if (x.size() != k) throw std::invalid_argument("inconsistent dimension in support");
        for (double v : x) {
            if (!(v >= 0.0)) throw std::invalid_argument("negative or non-finite coordinate");
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite coordinate");
        }
    }
    double mass = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("negative or non-finite probability");
        if (!std::isfinite(p)) throw std::invalid_argument("non-finite probability");
        mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-9)
        throw std::invalid_argument("probability mass sums to " + std::to_string(mass) +
                                    ", more than 1e-9 away from 1");

    DiscreteValuation d;
    d.k = static_cast<int>(k);
    for (std::size_t i = 0; i < support.size(); ++i) {
        std::size_t j = 0;
        for (; j < d.support.size(); ++j)
            if (d.support[j] == support[i]) break;
        if (j == d.support.size()) {
            d.support.push_back(std::move(support[i]));
            d.probs.push_back(probs[i]);
        } else {
            d.probs[j] += probs[i];
        }
    }
    if (std::abs(mass - 1.0) > 1e-12)
        for (double& p : d.probs) p /= mass;
    return d;
}

inline DiscreteValuation point_mass(ValuationPoint x) {
    return validate({std::move(x)}, {1.0});
}

/// E[ ||X||_1 ] — an always-valid revenue upper bound (tight for constants).
inline double expected_l1(const DiscreteValuation& d) {
    double s = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) s += d.probs[j] * l1_norm(d.support[j]);
    return s;
}

/// The distribution of lambda*X: every support point scaled coordinatewise.
inline DiscreteValuation scale(const DiscreteValuation& d, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("scale factor must be positive");
    auto support = d.support;
    for (auto& x : support)
        for (double& v : x) v *= lambda;
    return validate(std::move(support), d.probs);
}

/// Empirical distribution of n i.i.d. draws from d (mass 1/n per draw,
/// duplicates merged). Deterministic for a given seed.
inline DiscreteValuation sample(const DiscreteValuation& d, std::size_t n,
                                std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample size must be at least 1");
    std::vector<double> cdf(d.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        acc += d.probs[j];
        cdf[j] = acc;
    }
    cdf.back() = 1.0;

    Rng rng(seed);
    std::vector<std::size_t> count(d.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.uniform();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t j = static_cast<std::size_t>(it - cdf.begin());
        if (j >= d.size()) j = d.size() - 1;
        ++count[j];
    }

    std::vector<ValuationPoint> support;
    std::vector<double> probs;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (count[j] == 0) continue;
        support.push_back(d.support[j]);
        probs.push_back(static_cast<double>(count[j]) / static_cast<double>(n));
    }
    return validate(std::move(support), std::move(probs));
}

enum class PerturbMode { grid_round, uniform_shift, seeded_noise };

/// Moves every support point by at most delta in l1 distance, clamped to the
/// nonnegative orthant, so W(d, perturb(d, delta)) <= delta via the identity
/// coupling. grid_round snaps coordinates to a grid of cell 2*delta/k;
/// uniform_shift adds delta/k to every coordinate; seeded_noise moves each
/// point by a random vector of l1 length <= delta (pure given the seed).
inline DiscreteValuation perturb(const DiscreteValuation& d, double delta,
                                 PerturbMode mode, std::uint64_t seed = 0) {
    if (!(delta >= 0.0)) throw std::invalid_argument("perturbation radius must be >= 0");
    if (delta == 0.0) return d;

    auto support = d.support;
    const double k = static_cast<double>(d.k);
    switch (mode) {
        case PerturbMode::grid_round: {
            const double cell = 2.0 * delta / k;
            for (auto& x : support)
                for (double& v : x) v = std::max(0.0, std::round(v / cell) * cell);
            break;
        }
        case PerturbMode::uniform_shift: {
            const double step = delta / k;
            for (auto& x : support)
                for (double& v : x) v += step;
            break;
        }
        case PerturbMode::seeded_noise: {
            Rng rng(seed);
            for (auto& x : support) {
                std::vector<double> dir(x.size());
                double norm = 0.0;
                for (double& v : dir) {
                    v = rng.uniform(-1.0, 1.0);
                    norm += std::abs(v);
                }
                if (norm == 0.0) continue;
                const double radius = delta * rng.uniform();
                for (std::size_t i = 0; i < x.size(); ++i)
                    x[i] = std::max(0.0, x[i] + dir[i] / norm * radius);
            }
            break;
        }
    }
    return validate(std::move(support), d.probs);
}

}  // namespace revcont
