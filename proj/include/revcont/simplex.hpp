#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace revcont {

enum class RowSense { le, ge, eq };

/// Dense LP in the form  max c.v  subject to  row_i . v {<=,>=,=} rhs_i,  v >= 0.
struct LinearProgram {
    int num_vars = 0;
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<RowSense> senses;
    std::vector<double> rhs;

    explicit LinearProgram(int nv) : num_vars(nv), objective(nv, 0.0) {}

    void add_row(std::vector<double> coeffs, RowSense sense, double b) {
        if (static_cast<int>(coeffs.size()) != num_vars)
            throw std::invalid_argument("row length does not match variable count");
        rows.push_back(std::move(coeffs));
        senses.push_back(sense);
        rhs.push_back(b);
    }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit, numeric_error };

/// Independent optimality evidence: a dual vector recombined against the
/// original data. gap and the residuals are recomputed from scratch, not read
/// off the tableau.
struct LpCertificate {
    std::vector<double> dual;          // one multiplier per row, sign per sense
    double dual_objective = 0.0;       // y . b
    double gap = 0.0;                  // |primal - dual objective|
    double dual_infeasibility = 0.0;   // max_j max(0, c_j - (A^T y)_j), plus sign faults
    double primal_residual = 0.0;      // max constraint violation of x
};

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    double value = 0.0;
    std::vector<double> x;
    LpCertificate certificate;
    long iterations = 0;
};

namespace detail {

// Dense LU with partial pivoting; solves in place. Returns false on a
// (numerically) singular matrix.
class LuFactors {
public:
    explicit LuFactors(std::vector<std::vector<double>> a) : a_(std::move(a)), n_(a_.size()) {
        perm_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;
        for (std::size_t col = 0; col < n_; ++col) {
            std::size_t pivot = col;
            for (std::size_t r = col + 1; r < n_; ++r)
                if (std::abs(a_[r][col]) > std::abs(a_[pivot][col])) pivot = r;
            if (std::abs(a_[pivot][col]) < 1e-12) {
                singular_ = true;
                return;
            }
            std::swap(a_[col], a_[pivot]);
            std::swap(perm_[col], perm_[pivot]);
            for (std::size_t r = col + 1; r < n_; ++r) {
                const double f = a_[r][col] / a_[col][col];
                a_[r][col] = f;
                for (std::size_t j = col + 1; j < n_; ++j) a_[r][j] -= f * a_[col][j];
            }
        }
    }

    bool singular() const { return singular_; }

    std::vector<double> solve(const std::vector<double>& b) const {
        std::vector<double> x(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= a_[i][j] * x[j];
        for (std::size_t i = n_; i-- > 0;) {
            for (std::size_t j = i + 1; j < n_; ++j) x[i] -= a_[i][j] * x[j];
            x[i] /= a_[i][i];
        }
        return x;
    }

private:
    std::vector<std::vector<double>> a_;
    std::size_t n_;
    std::vector<std::size_t> perm_;
    bool singular_ = false;
};

// Full-tableau two-phase simplex. Dantzig pricing with a stability-aware
// ratio test; Bland's rule takes over when pivots stall, which rules out
// cycling. The tableau only selects the final basis — the reported solution,
// duals, and certificate are recomputed from the original data through a
// fresh LU factorization of that basis.
class SimplexTableau {
public:
    // rhs_jitter breaks the heavy degeneracy of all-zero right-hand sides
    // (every vertex of an IC polytope is degenerate otherwise and the ratio
    // test stalls). The final solution is recomputed against the true rhs,
    // so the jitter only steers the pivot path; the certificate validates
    // the basis it lands on.
    SimplexTableau(const LinearProgram& lp, bool force_bland, double rhs_jitter)
        : lp_(lp), force_bland_(force_bland), rhs_jitter_(rhs_jitter), m_(lp.rows.size()) {
        // Column layout: [structural | one slack per le/ge row | one artificial
        // per ge/eq row | rhs]. Rows with negative rhs are flipped first.
        nv_ = lp.num_vars;
        slack_col_.assign(m_, -1);
        art_col_.assign(m_, -1);
        row_sign_.assign(m_, 1.0);

        int extra = 0;
        std::vector<RowSense> senses = lp.senses;
        for (std::size_t i = 0; i < m_; ++i) {
            if (lp.rhs[i] < 0.0) {
                row_sign_[i] = -1.0;
                if (senses[i] == RowSense::le) senses[i] = RowSense::ge;
                else if (senses[i] == RowSense::ge) senses[i] = RowSense::le;
            }
            if (senses[i] != RowSense::eq) ++extra;
            if (senses[i] != RowSense::le) ++extra;
        }
        senses_ = std::move(senses);
        ncols_ = nv_ + extra;
        tab_.assign(m_ + 1, std::vector<double>(ncols_ + 1, 0.0));
        basis_.assign(m_, -1);
        is_artificial_.assign(ncols_, 0);

        int col = nv_;
        for (std::size_t i = 0; i < m_; ++i) {
            auto& row = tab_[i];
            for (int j = 0; j < nv_; ++j) row[j] = row_sign_[i] * lp.rows[i][j];
            // Deterministic per-row jitter in [jitter, 2*jitter).
            const double eta =
                1.0 + static_cast<double>((i * 2654435761u + 12345u) % 1024u) / 1024.0;
            row[ncols_] = row_sign_[i] * lp.rhs[i] + rhs_jitter_ * eta;
            if (senses_[i] == RowSense::le) {
                slack_col_[i] = col;
                row[col++] = 1.0;
                basis_[i] = slack_col_[i];
            } else if (senses_[i] == RowSense::ge) {
                slack_col_[i] = col;
                row[col++] = -1.0;
            }
            if (senses_[i] != RowSense::le) {
                art_col_[i] = col;
                is_artificial_[col] = 1;
                row[col++] = 1.0;
                basis_[i] = art_col_[i];
            }
        }
        has_artificials_ = std::any_of(art_col_.begin(), art_col_.end(),
                                       [](int c) { return c >= 0; });
    }

    LpSolution solve() {
        LpSolution out;
        if (has_artificials_) {
            // Phase 1: maximize -sum(artificials); feasible iff it reaches 0.
            auto& obj = tab_[m_];
            std::fill(obj.begin(), obj.end(), 0.0);
            for (int j = 0; j < ncols_; ++j)
                if (is_artificial_[j]) obj[j] = 1.0;
            for (std::size_t i = 0; i < m_; ++i)
                if (basis_[i] >= 0 && is_artificial_[basis_[i]])
                    for (int j = 0; j <= ncols_; ++j) obj[j] -= tab_[i][j];

            const LpStatus st = iterate(/*phase1=*/true, out.iterations);
            if (st == LpStatus::iteration_limit) {
                out.status = st;
                return out;
            }
            double infeas = 0.0;
            for (std::size_t i = 0; i < m_; ++i)
                if (basis_[i] >= 0 && is_artificial_[basis_[i]]) infeas += tab_[i][ncols_];
            if (infeas > 1e-7) {
                out.status = LpStatus::infeasible;
                return out;
            }

            // Drive leftover artificials out of the basis so phase 2 cannot
            // re-inflate them. All-zero rows are redundant and stay put.
            for (std::size_t i = 0; i < m_; ++i) {
                if (basis_[i] < 0 || !is_artificial_[basis_[i]]) continue;
                for (int j = 0; j < ncols_; ++j) {
                    if (is_artificial_[j]) continue;
                    if (std::abs(tab_[i][j]) > 1e-9) {
                        pivot(i, j);
                        break;
                    }
                }
            }
        }

        // Phase 2 objective row rebuilt from the original costs.
        auto& obj = tab_[m_];
        std::fill(obj.begin(), obj.end(), 0.0);
        for (int j = 0; j < nv_; ++j) obj[j] = -lp_.objective[j];
        for (std::size_t i = 0; i < m_; ++i) {
            const int b = basis_[i];
            if (b >= 0 && b < nv_ && lp_.objective[b] != 0.0)
                for (int j = 0; j <= ncols_; ++j) obj[j] += lp_.objective[b] * tab_[i][j];
        }

        out.status = iterate(/*phase1=*/false, out.iterations);
        if (out.status == LpStatus::unbounded) return out;
        refresh_from_basis(out);
        return out;
    }

private:
    static constexpr double kPivotTol = 1e-9;
    static constexpr double kRatioTol = 1e-9;

    LpStatus iterate(bool phase1, long& iterations) {
        const long limit = 25L * static_cast<long>(m_ + ncols_) + 2000;
        long stall = 0;
        bool bland = force_bland_;
        for (long it = 0;; ++it, ++iterations) {
            if (it > limit) return LpStatus::iteration_limit;
            const auto& obj = tab_[m_];

            int enter = -1;
            if (bland) {
                for (int j = 0; j < ncols_; ++j) {
                    if (is_artificial_[j] && !phase1) continue;
                    if (obj[j] < -kPivotTol) {
                        enter = j;
                        break;
                    }
                }
            } else {
                double best = -kPivotTol;
                for (int j = 0; j < ncols_; ++j) {
                    if (is_artificial_[j] && !phase1) continue;
                    if (obj[j] < best) {
                        best = obj[j];
                        enter = j;
                    }
                }
            }
            if (enter < 0) return LpStatus::optimal;

            // Ratio test, two passes: find the minimum ratio, then choose the
            // numerically largest pivot among rows within tolerance of it
            // (lowest basis index under Bland's rule).
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = tab_[i][enter];
                if (a <= kPivotTol) continue;
                best_ratio = std::min(best_ratio, tab_[i][ncols_] / a);
            }
            if (best_ratio == std::numeric_limits<double>::infinity())
                return LpStatus::unbounded;

            const double ratio_cut = best_ratio + kRatioTol * (1.0 + std::abs(best_ratio));
            int leave = -1;
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = tab_[i][enter];
                if (a <= kPivotTol) continue;
                if (tab_[i][ncols_] / a > ratio_cut) continue;
                if (leave < 0) {
                    leave = static_cast<int>(i);
                    continue;
                }
                const std::size_t l = static_cast<std::size_t>(leave);
                if (bland) {
                    if (basis_[i] < basis_[l]) leave = static_cast<int>(i);
                } else {
                    // Kick artificials first, then prefer the largest pivot.
                    const bool cand_art = is_artificial_[basis_[i]];
                    const bool cur_art = is_artificial_[basis_[l]];
                    if (cand_art != cur_art) {
                        if (cand_art) leave = static_cast<int>(i);
                    } else if (std::abs(a) > std::abs(tab_[l][enter])) {
                        leave = static_cast<int>(i);
                    }
                }
            }

            if (best_ratio <= kRatioTol) {
                if (++stall > 50) bland = true;
            } else {
                stall = 0;
                bland = force_bland_;
            }
            pivot(static_cast<std::size_t>(leave), enter);
        }
    }

    void pivot(std::size_t prow, int pcol) {
        auto& pr = tab_[prow];
        const double pv = pr[pcol];
        for (int j = 0; j <= ncols_; ++j) pr[j] /= pv;
        pr[pcol] = 1.0;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == prow) continue;
            auto& row = tab_[i];
            const double f = row[pcol];
            if (f == 0.0) continue;
            for (int j = 0; j <= ncols_; ++j) row[j] -= f * pr[j];
            row[pcol] = 0.0;
        }
        basis_[prow] = pcol;
    }

    // Column of the (sign-flipped) standard-form system.
    double system_entry(std::size_t i, int col) const {
        if (col < nv_) return row_sign_[i] * lp_.rows[i][col];
        if (col == slack_col_[i]) return senses_[i] == RowSense::le ? 1.0 : -1.0;
        if (col == art_col_[i]) return 1.0;
        return 0.0;
    }

    // Recompute x, y, value, and the certificate from the original data and
    // the final basis: B x_B = b and B^T y = c_B via a fresh LU.
    void refresh_from_basis(LpSolution& out) const {
        std::vector<std::vector<double>> basis_matrix(m_, std::vector<double>(m_, 0.0));
        std::vector<std::vector<double>> basis_matrix_t(m_, std::vector<double>(m_, 0.0));
        std::vector<double> b(m_), cb(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            b[i] = row_sign_[i] * lp_.rhs[i];
            for (std::size_t r = 0; r < m_; ++r) {
                const double v = system_entry(r, basis_[i]);
                basis_matrix[r][i] = v;
                basis_matrix_t[i][r] = v;
            }
            cb[i] = basis_[i] < nv_ ? lp_.objective[basis_[i]] : 0.0;
        }

        const LuFactors lu(std::move(basis_matrix));
        if (lu.singular()) {
            // Fall back to the tableau values; the caller inspects the
            // certificate and may retry under Bland's rule.
            extract_from_tableau(out);
            return;
        }
        const auto xb = lu.solve(b);
        const LuFactors lut(std::move(basis_matrix_t));
        const auto y_flipped = lut.singular() ? std::vector<double>(m_, 0.0) : lut.solve(cb);

        out.x.assign(nv_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < nv_) out.x[basis_[i]] = xb[i];
        out.value = 0.0;
        for (int j = 0; j < nv_; ++j) out.value += lp_.objective[j] * out.x[j];

        std::vector<double> dual(m_);
        for (std::size_t i = 0; i < m_; ++i) dual[i] = row_sign_[i] * y_flipped[i];
        out.certificate = certify(out.x, out.value, std::move(dual));
    }

    void extract_from_tableau(LpSolution& out) const {
        out.x.assign(nv_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= 0 && basis_[i] < nv_) out.x[basis_[i]] = tab_[i][ncols_];
        out.value = 0.0;
        for (int j = 0; j < nv_; ++j) out.value += lp_.objective[j] * out.x[j];

        std::vector<double> dual(m_, 0.0);
        const auto& obj = tab_[m_];
        for (std::size_t i = 0; i < m_; ++i) {
            const double y = art_col_[i] >= 0 ? obj[art_col_[i]] : obj[slack_col_[i]];
            dual[i] = row_sign_[i] * y;
        }
        out.certificate = certify(out.x, out.value, std::move(dual));
    }

    LpCertificate certify(const std::vector<double>& x, double value,
                          std::vector<double> dual) const {
        LpCertificate cert;
        cert.dual = std::move(dual);

        cert.dual_objective = 0.0;
        for (std::size_t i = 0; i < m_; ++i) cert.dual_objective += cert.dual[i] * lp_.rhs[i];
        cert.gap = std::abs(cert.dual_objective - value);

        // A^T y >= c, with y >= 0 on <= rows and y <= 0 on >= rows.
        for (int j = 0; j < nv_; ++j) {
            double aty = 0.0;
            for (std::size_t i = 0; i < m_; ++i) aty += cert.dual[i] * lp_.rows[i][j];
            cert.dual_infeasibility =
                std::max(cert.dual_infeasibility, lp_.objective[j] - aty);
        }
        for (std::size_t i = 0; i < m_; ++i) {
            if (lp_.senses[i] == RowSense::le)
                cert.dual_infeasibility = std::max(cert.dual_infeasibility, -cert.dual[i]);
            else if (lp_.senses[i] == RowSense::ge)
                cert.dual_infeasibility = std::max(cert.dual_infeasibility, cert.dual[i]);
        }
        cert.dual_infeasibility = std::max(cert.dual_infeasibility, 0.0);

        for (std::size_t i = 0; i < m_; ++i) {
            double ax = 0.0;
            for (int j = 0; j < nv_; ++j) ax += lp_.rows[i][j] * x[j];
            const double bi = lp_.rhs[i];
            double viol = 0.0;
            if (lp_.senses[i] == RowSense::le) viol = ax - bi;
            else if (lp_.senses[i] == RowSense::ge) viol = bi - ax;
            else viol = std::abs(ax - bi);
            cert.primal_residual = std::max(cert.primal_residual, viol);
        }
        for (int j = 0; j < nv_; ++j)
            cert.primal_residual = std::max(cert.primal_residual, -x[j]);
        return cert;
    }

    const LinearProgram& lp_;
    bool force_bland_ = false;
    double rhs_jitter_ = 0.0;
    std::size_t m_;
    int nv_ = 0;
    int ncols_ = 0;
    std::vector<std::vector<double>> tab_;
    std::vector<int> basis_;
    std::vector<int> slack_col_, art_col_;
    std::vector<double> row_sign_;
    std::vector<char> is_artificial_;
    std::vector<RowSense> senses_;
    bool has_artificials_ = false;
};

// Optimality is certified at 1e-7, feasibility at 1e-9 (absolute).
inline bool certificate_clean(const LpSolution& sol) {
    return sol.certificate.gap <= 1e-7 && sol.certificate.dual_infeasibility <= 1e-7 &&
           sol.certificate.primal_residual <= 1e-9;
}

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram& lp) {
    if (lp.rows.empty()) {
        // No constraints: optimum is 0 iff no positive objective coefficient.
        LpSolution out;
        out.x.assign(lp.num_vars, 0.0);
        const bool unbounded =
            std::any_of(lp.objective.begin(), lp.objective.end(), [](double c) { return c > 0.0; });
        out.status = unbounded ? LpStatus::unbounded : LpStatus::optimal;
        return out;
    }

    double bscale = 1.0;
    for (double b : lp.rhs) bscale = std::max(bscale, std::abs(b));

    // Jittered Dantzig first (fast on the heavily degenerate IC polytopes),
    // stepping down to the exact problem and finally to pure Bland. An
    // infeasible verdict is only trusted at zero jitter; unbounded rays do
    // not depend on the right-hand side at all.
    struct Attempt {
        double jitter;
        bool bland;
    };
    const Attempt attempts[] = {
        {1e-7 * bscale, false}, {1e-10 * bscale, false}, {0.0, false}, {0.0, true}};

    LpSolution best;
    bool have_best = false;
    long total_iterations = 0;
    for (const auto& attempt : attempts) {
        auto sol = detail::SimplexTableau(lp, attempt.bland, attempt.jitter).solve();
        total_iterations += sol.iterations;
        sol.iterations = total_iterations;
        if (sol.status == LpStatus::unbounded) return sol;
        if (sol.status == LpStatus::infeasible) {
            if (attempt.jitter == 0.0) return sol;
            continue;
        }
        if (sol.status == LpStatus::optimal && detail::certificate_clean(sol)) return sol;
        const auto badness = [](const LpSolution& s) {
            return s.certificate.gap + s.certificate.dual_infeasibility +
                   s.certificate.primal_residual;
        };
        if (!have_best || badness(sol) < badness(best)) {
            best = std::move(sol);
            have_best = true;
        }
    }
    if (!have_best) {
        best.status = LpStatus::infeasible;
        return best;
    }
    if (best.status == LpStatus::optimal) best.status = LpStatus::numeric_error;
    best.iterations = total_iterations;
    return best;
}

}  // namespace revcont
