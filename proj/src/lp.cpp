#include "ncsched/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ncsched/rates.hpp"

namespace ncsched {

std::string to_string(LpStatus status) {
    switch (status) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

void LinearProgram::validate() const {
    const std::size_t n = objective.size();
    if (bounds.size() != n) throw std::invalid_argument("LP: bounds size differs from objective");
    for (const auto& c : constraints)
        if (c.coeffs.size() != n) throw std::invalid_argument("LP: constraint width mismatch");
}

namespace {

class Tableau {
public:
    Tableau(int rows, int cols) : rows_(rows), cols_(cols), cells_(rows * (cols + 1), 0.0) {}

    double& at(int r, int c) { return cells_[r * (cols_ + 1) + c]; }
    double at(int r, int c) const { return cells_[r * (cols_ + 1) + c]; }
    double& rhs(int r) { return at(r, cols_); }
    double rhs(int r) const { return at(r, cols_); }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    void pivot(int pr, int pc) {
        const double piv = at(pr, pc);
        for (int c = 0; c <= cols_; ++c) at(pr, c) /= piv;
        for (int r = 0; r < rows_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (int c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
    }

    void drop_row(int r) {
        cells_.erase(cells_.begin() + r * (cols_ + 1), cells_.begin() + (r + 1) * (cols_ + 1));
        --rows_;
    }

private:
    int rows_;
    int cols_;
    std::vector<double> cells_;
};

enum class PhaseResult { optimal, unbounded };

// Maximizes cost . x over the tableau's current basis. Columns flagged in
// `blocked` may not enter.
PhaseResult run_phase(Tableau& t, std::vector<int>& basis, const std::vector<double>& cost,
                      const std::vector<bool>& blocked) {
    const int n = t.cols();
    std::vector<double> reduced(n);
    while (true) {
        for (int j = 0; j < n; ++j) {
            double z = 0.0;
            for (int r = 0; r < t.rows(); ++r) z += cost[basis[r]] * t.at(r, j);
            reduced[j] = cost[j] - z;
        }
        int enter = -1;
        for (int j = 0; j < n; ++j) {
            if (!blocked[j] && reduced[j] > kPivotTolerance) {
                enter = j;
                break;
            }
        }
        if (enter < 0) return PhaseResult::optimal;

        int leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < t.rows(); ++r) {
            const double a = t.at(r, enter);
            if (a <= kPivotTolerance) continue;
            const double ratio = t.rhs(r) / a;
            if (leave < 0 || ratio < best - kPivotTolerance) {
                leave = r;
                best = ratio;
            } else if (ratio <= best + kPivotTolerance && basis[r] < basis[leave]) {
                leave = r;
                best = std::min(best, ratio);
            }
        }
        if (leave < 0) return PhaseResult::unbounded;
        t.pivot(leave, enter);
        basis[leave] = enter;
    }
}

}  // namespace

LpSolution simplex_solve(const LinearProgram& lp) {
    lp.validate();
    const int n_orig = lp.variables();

    // Column layout: structural columns (free variables split in two), then
    // one slack/surplus per inequality, then artificials.
    std::vector<int> plus_col(n_orig), minus_col(n_orig, -1);
    int n_struct = 0;
    for (int j = 0; j < n_orig; ++j) {
        plus_col[j] = n_struct++;
        if (lp.bounds[j] == VariableBound::free) minus_col[j] = n_struct++;
    }

    struct Row {
        std::vector<double> coeffs;
        double rhs;
        int sign;  // +1 slack (<=), -1 surplus (>=), 0 equality
    };
    std::vector<Row> rows;
    for (const auto& c : lp.constraints) {
        Row row{std::vector<double>(n_struct, 0.0), c.rhs, c.relation == Relation::equal ? 0 : 1};
        for (int j = 0; j < n_orig; ++j) {
            row.coeffs[plus_col[j]] = c.coeffs[j];
            if (minus_col[j] >= 0) row.coeffs[minus_col[j]] = -c.coeffs[j];
        }
        if (row.rhs < 0.0) {
            for (auto& v : row.coeffs) v = -v;
            row.rhs = -row.rhs;
            row.sign = -row.sign;
        }
        rows.push_back(std::move(row));
    }

    const int m = static_cast<int>(rows.size());
    int n_slack = 0, n_art = 0;
    for (const auto& r : rows) {
        if (r.sign != 0) ++n_slack;
        if (r.sign <= 0) ++n_art;
    }
    const int art_begin = n_struct + n_slack;
    const int n_cols = art_begin + n_art;

    Tableau t(m, n_cols);
    std::vector<int> basis(m);
    int slack = n_struct, art = art_begin;
    for (int r = 0; r < m; ++r) {
        for (int j = 0; j < n_struct; ++j) t.at(r, j) = rows[r].coeffs[j];
        t.rhs(r) = rows[r].rhs;
        if (rows[r].sign != 0) {
            t.at(r, slack) = rows[r].sign;
            if (rows[r].sign > 0) basis[r] = slack;
            ++slack;
        }
        if (rows[r].sign <= 0) {
            t.at(r, art) = 1.0;
            basis[r] = art++;
        }
    }

    LpSolution sol;
    std::vector<bool> blocked(n_cols, false);

    if (n_art > 0) {
        std::vector<double> phase1(n_cols, 0.0);
        for (int j = art_begin; j < n_cols; ++j) phase1[j] = -1.0;
        run_phase(t, basis, phase1, blocked);
        double infeasibility = 0.0;
        for (int r = 0; r < t.rows(); ++r)
            if (basis[r] >= art_begin) infeasibility += t.rhs(r);
        if (infeasibility > kPivotTolerance) {
            sol.status = LpStatus::infeasible;
            return sol;
        }
        // Drive remaining (zero-level) artificials out of the basis.
        for (int r = 0; r < t.rows();) {
            if (basis[r] < art_begin) {
                ++r;
                continue;
            }
            int col = -1;
            for (int j = 0; j < art_begin; ++j)
                if (std::abs(t.at(r, j)) > kPivotTolerance) {
                    col = j;
                    break;
                }
            if (col >= 0) {
                t.pivot(r, col);
                basis[r] = col;
                ++r;
            } else {
                t.drop_row(r);  // redundant constraint
                basis.erase(basis.begin() + r);
            }
        }
        for (int j = art_begin; j < n_cols; ++j) blocked[j] = true;
    }

    std::vector<double> cost(n_cols, 0.0);
    for (int j = 0; j < n_orig; ++j) {
        cost[plus_col[j]] = lp.objective[j];
        if (minus_col[j] >= 0) cost[minus_col[j]] = -lp.objective[j];
    }
    if (run_phase(t, basis, cost, blocked) == PhaseResult::unbounded) {
        sol.status = LpStatus::unbounded;
        return sol;
    }

    std::vector<double> x_std(n_cols, 0.0);
    for (int r = 0; r < t.rows(); ++r) x_std[basis[r]] = t.rhs(r);
    sol.x.assign(n_orig, 0.0);
    for (int j = 0; j < n_orig; ++j) {
        sol.x[j] = x_std[plus_col[j]] - (minus_col[j] >= 0 ? x_std[minus_col[j]] : 0.0);
        sol.objective += lp.objective[j] * sol.x[j];
    }
    sol.status = LpStatus::optimal;
    return sol;
}

LinearProgram build_stability_lp(int n_users, std::span<const double> eps, double lambda, int cap) {
    if (static_cast<int>(eps.size()) != n_users)
        throw std::invalid_argument("eps must have one entry per user");
    const auto schedules = enumerate_schedules(n_users, cap);
    const SubQueueLayout layout(n_users);
    const int m = layout.size();
    const int b = static_cast<int>(schedules.size());
    const std::vector<bool> saturated(m, true);

    LinearProgram lp;
    lp.objective.assign(b + 1, 0.0);
    lp.objective[b] = 1.0;
    lp.bounds.assign(b + 1, VariableBound::non_negative);
    lp.bounds[b] = VariableBound::free;
    lp.constraints.assign(m, LinearConstraint{std::vector<double>(b + 1, 0.0), Relation::less_equal, 0.0});
    for (int i = 0; i < m; ++i) {
        lp.constraints[i].coeffs[b] = 1.0;
        lp.constraints[i].rhs = (i == 0) ? -lambda : 0.0;
    }
    for (int j = 0; j < b; ++j) {
        const RateVector r = expected_rates(layout, schedules[j], saturated, eps, 0.0);
        for (int i = 0; i < m; ++i) lp.constraints[i].coeffs[j] = r.a[i] - r.d[i];
    }
    LinearConstraint total{std::vector<double>(b + 1, 1.0), Relation::equal, 1.0};
    total.coeffs[b] = 0.0;
    lp.constraints.push_back(std::move(total));
    return lp;
}

StabilitySolution solve_stability(int n_users, std::span<const double> eps, double lambda, int cap) {
    const LinearProgram lp = build_stability_lp(n_users, eps, lambda, cap);
    const LpSolution raw = simplex_solve(lp);
    StabilitySolution out;
    out.status = raw.status;
    if (raw.status != LpStatus::optimal) return out;
    out.delta_max = raw.x.back();
    out.p.assign(raw.x.begin(), raw.x.end() - 1);
    for (auto& p : out.p) p = std::max(0.0, p);
    return out;
}

double capacity_threshold(std::span<const double> eps) {
    if (eps.empty()) return 1.0;
    return 1.0 - *std::max_element(eps.begin(), eps.end());
}

double lp_threshold_bisection(std::span<const double> eps, double tolerance) {
    const int n = static_cast<int>(eps.size());
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (solve_stability(n, eps, mid).delta_max > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace ncsched
