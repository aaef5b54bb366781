#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "revcont/valuation.hpp"

namespace revcont {

/// Ground cost rho(x - y) for the coupling objective: plain l1 / linf, or the
/// dual Gamma-seminorm of an allocation space (gamma:additive == l1).
struct GroundCost {
    enum class Kind { l1, linf, gamma };
    Kind kind = Kind::l1;
    SpaceKind space = SpaceKind::additive;

    static GroundCost L1() { return {Kind::l1, SpaceKind::additive}; }
    static GroundCost Linf() { return {Kind::linf, SpaceKind::additive}; }
    static GroundCost Gamma(SpaceKind s) { return {Kind::gamma, s}; }

    double operator()(const ValuationPoint& x, const ValuationPoint& y) const {
        std::vector<double> z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
        switch (kind) {
            case Kind::l1: return l1_norm(z);
            case Kind::linf: return linf_norm(z);
            case Kind::gamma: return gamma_seminorm(space, z);
        }
        return 0.0;
    }

    std::string name() const {
        switch (kind) {
            case Kind::l1: return "l1";
            case Kind::linf: return "linf";
            case Kind::gamma: return std::string("gamma:") + to_string(space);
        }
        return "?";
    }
};

inline GroundCost ground_cost_from_string(const std::string& s) {
    if (s == "l1") return GroundCost::L1();
    if (s == "linf") return GroundCost::Linf();
    if (s.rfind("gamma:", 0) == 0) return GroundCost::Gamma(space_kind_from_string(s.substr(6)));
    throw std::invalid_argument("unknown ground cost: " + s);
}

/// Optimal coupling between two finite distributions: joint mass matrix whose
/// row sums are the source probabilities and column sums the target ones.
struct TransportPlan {
    std::vector<std::vector<double>> matrix;  // n x m
    double cost = 0.0;
    GroundCost ground_cost;
};

struct WassersteinResult {
    double value = 0.0;
    TransportPlan plan;
};

namespace detail {

// Mass value with a symbolic epsilon component: v + e * eps. Supplies are
// perturbed by eps (and the last demand by n*eps) so every basic solution of
// the transportation problem is nondegenerate and MODI cannot cycle.
struct Mass {
    double v = 0.0;
    double e = 0.0;

    Mass operator+(const Mass& o) const { return {v + o.v, e + o.e}; }
    Mass operator-(const Mass& o) const { return {v - o.v, e - o.e}; }
    bool operator<(const Mass& o) const { return v != o.v ? v < o.v : e < o.e; }
    bool positive() const { return v != 0.0 ? v > 0.0 : e > 0.0; }
};

struct BasicCell {
    int i = 0, j = 0;
    Mass flow;
};

}  // namespace detail

/// Exact order-1 Wasserstein distance between two finite distributions under
/// the given ground cost, solved as an n x m transportation problem
/// (north-west-corner start, MODI improvement). Returns the optimal value and
/// a vertex coupling.
inline WassersteinResult wasserstein(const DiscreteValuation& dx,
                                     const DiscreteValuation& dy,
                                     GroundCost cost = GroundCost::L1()) {
    using detail::BasicCell;
    using detail::Mass;

    if (dx.k != dy.k) throw std::invalid_argument("dimension mismatch between distributions");
    const int n = static_cast<int>(dx.size());
    const int m = static_cast<int>(dy.size());

    std::vector<std::vector<double>> c(n, std::vector<double>(m));
    double cmax = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            c[i][j] = cost(dx.support[i], dy.support[j]);
            cmax = std::max(cmax, c[i][j]);
        }
    const double tol = 1e-12 * (1.0 + cmax);

    std::vector<Mass> supply(n), demand(m);
    for (int i = 0; i < n; ++i) supply[i] = {dx.probs[i], 1.0};
    for (int j = 0; j < m; ++j) demand[j] = {dy.probs[j], j == m - 1 ? double(n) : 0.0};

    // North-west corner start: exactly n + m - 1 basic cells.
    std::vector<BasicCell> basis;
    basis.reserve(static_cast<std::size_t>(n + m - 1));
    {
        int i = 0, j = 0;
        Mass a = supply[0], b = demand[0];
        while (true) {
            Mass f = std::min(a, b);
            basis.push_back({i, j, f});
            a = a - f;
            b = b - f;
            if (i == n - 1 && j == m - 1) break;
            const bool supply_done = !a.positive();
            if (supply_done && i < n - 1) {
                ++i;
                a = supply[i];
            } else {
                ++j;
                b = demand[j];
            }
        }
    }

    std::vector<double> u(n), v(m);
    std::vector<char> is_basic(static_cast<std::size_t>(n) * m, 0);
    auto flat = [m](int i, int j) { return static_cast<std::size_t>(i) * m + j; };
    for (const auto& cell : basis) is_basic[flat(cell.i, cell.j)] = 1;

    const long max_iters = 1000L * (n + m) + 10000;
    for (long iter = 0;; ++iter) {
        if (iter > max_iters)
            throw std::runtime_error("transportation simplex failed to converge");

        // Potentials from the basis tree (nodes: rows 0..n-1, cols n..n+m-1).
        std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n + m));
        for (std::size_t b = 0; b < basis.size(); ++b) {
            adj[basis[b].i].push_back({n + basis[b].j, static_cast<int>(b)});
            adj[n + basis[b].j].push_back({basis[b].i, static_cast<int>(b)});
        }
        std::vector<char> seen(static_cast<std::size_t>(n + m), 0);
        std::queue<int> bfs;
        u[0] = 0.0;
        seen[0] = 1;
        bfs.push(0);
        while (!bfs.empty()) {
            int node = bfs.front();
            bfs.pop();
            for (auto [next, b] : adj[node]) {
                if (seen[next]) continue;
                seen[next] = 1;
                const auto& cell = basis[static_cast<std::size_t>(b)];
                if (next >= n)
                    v[next - n] = c[cell.i][cell.j] - u[cell.i];
                else
                    u[next] = c[cell.i][cell.j] - v[cell.j];
                bfs.push(next);
            }
        }

        // Entering cell: most negative reduced cost.
        int ei = -1, ej = -1;
        double best = -tol;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                if (is_basic[flat(i, j)]) continue;
                const double d = c[i][j] - u[i] - v[j];
                if (d < best) {
                    best = d;
                    ei = i;
                    ej = j;
                }
            }
        if (ei < 0) break;  // optimal

        // Unique tree path from row ei to column ej; cycle = path + entering.
        std::vector<int> parent_node(static_cast<std::size_t>(n + m), -1);
        std::vector<int> parent_edge(static_cast<std::size_t>(n + m), -1);
        std::fill(seen.begin(), seen.end(), 0);
        std::queue<int> q2;
        q2.push(ei);
        seen[ei] = 1;
        while (!q2.empty()) {
            int node = q2.front();
            q2.pop();
            if (node == n + ej) break;
            for (auto [next, b] : adj[node]) {
                if (seen[next]) continue;
                seen[next] = 1;
                parent_node[next] = node;
                parent_edge[next] = b;
                q2.push(next);
            }
        }

        // Walk back from the column node; edges alternate -,+,-,... ending at ei.
        std::vector<int> path;  // basis indices, from ej side back to ei
        for (int node = n + ej; node != ei; node = parent_node[node])
            path.push_back(parent_edge[node]);

        // Odd-length alternating path: positions 0,2,4,.. get minus.
        Mass theta = basis[static_cast<std::size_t>(path[0])].flow;
        std::size_t leave_pos = 0;
        for (std::size_t t = 0; t < path.size(); t += 2) {
            const Mass& f = basis[static_cast<std::size_t>(path[t])].flow;
            if (f < theta) {
                theta = f;
                leave_pos = t;
            }
        }
        for (std::size_t t = 0; t < path.size(); ++t) {
            Mass& f = basis[static_cast<std::size_t>(path[t])].flow;
            f = (t % 2 == 0) ? f - theta : f + theta;
        }
        const int leave = path[leave_pos];
        auto& cell = basis[static_cast<std::size_t>(leave)];
        is_basic[flat(cell.i, cell.j)] = 0;
        is_basic[flat(ei, ej)] = 1;
        cell = {ei, ej, theta};
    }

    WassersteinResult out;
    out.plan.ground_cost = cost;
    out.plan.matrix.assign(static_cast<std::size_t>(n), std::vector<double>(m, 0.0));
    double total = 0.0;
    for (const auto& cell : basis) {
        const double f = std::max(0.0, cell.flow.v);
        out.plan.matrix[cell.i][cell.j] += f;
        total += f * c[cell.i][cell.j];
    }
    out.plan.cost = total;
    out.value = total;
    return out;
}

inline WassersteinResult wasserstein_gamma(const DiscreteValuation& dx,
                                           const DiscreteValuation& dy,
                                           SpaceKind space) {
    return wasserstein(dx, dy, GroundCost::Gamma(space));
}

/// Brute-force optimal coupling for uniform distributions of equal support
/// size n <= 7: permutation couplings are the vertices of the Birkhoff
/// polytope, so min over all n! matchings is exact. Verification oracle only.
inline double assignment_oracle(const DiscreteValuation& dx, const DiscreteValuation& dy,
                                GroundCost cost = GroundCost::L1()) {
    if (dx.k != dy.k) throw std::invalid_argument("dimension mismatch between distributions");
    const std::size_t n = dx.size();
    if (n != dy.size() || n > 7)
        throw std::invalid_argument("assignment oracle needs equal support sizes <= 7");
    for (double p : dx.probs)
        if (std::abs(p - 1.0 / double(n)) > 1e-12)
            throw std::invalid_argument("assignment oracle needs uniform distributions");
    for (double p : dy.probs)
        if (std::abs(p - 1.0 / double(n)) > 1e-12)
            throw std::invalid_argument("assignment oracle needs uniform distributions");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += cost(dx.support[i], dy.support[perm[i]]);
        best = std::min(best, total / double(n));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace revcont
