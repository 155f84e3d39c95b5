#pragma once

#include <span>
#include <string>
#include <vector>

#include "ncsched/schedule.hpp"

namespace ncsched {

enum class Relation { less_equal, equal };
enum class VariableBound { non_negative, free };
enum class LpStatus { optimal, unbounded, infeasible };

std::string to_string(LpStatus status);

struct LinearConstraint {
    std::vector<double> coeffs;
    Relation relation = Relation::less_equal;
    double rhs = 0.0;
};

/// maximize objective . x subject to the constraints and per-variable bounds.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<LinearConstraint> constraints;
    std::vector<VariableBound> bounds;

    int variables() const { return static_cast<int>(objective.size()); }
    /// Throws std::invalid_argument on dimension mismatches.
    void validate() const;
};

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
};

inline constexpr double kPivotTolerance = 1e-9;

/// Two-phase dense tableau simplex with Bland's rule. Infeasible and
/// unbounded programs are reported through the status, not thrown.
LpSolution simplex_solve(const LinearProgram& lp);

/// The stability LP: variables (p_0 .. p_{B-1}, delta). One row per
/// sub-queue: sum_j p_j (a_i(j) - d_i(j)) + delta <= -lambda [i == 0], with
/// a and d taken from expected_rates under full occupancy; plus sum p_j = 1.
LinearProgram build_stability_lp(int n_users, std::span<const double> eps, double lambda,
                                 int cap = kDefaultScheduleCap);

struct StabilitySolution {
    LpStatus status = LpStatus::infeasible;
    double delta_max = 0.0;
    std::vector<double> p;
};

StabilitySolution solve_stability(int n_users, std::span<const double> eps, double lambda,
                                  int cap = kDefaultScheduleCap);

/// 1 - max_i eps_i.
double capacity_threshold(std::span<const double> eps);

/// Largest lambda with delta_max > 0, located by bisection on the LP.
double lp_threshold_bisection(std::span<const double> eps, double tolerance = 1e-4);

}  // namespace ncsched
