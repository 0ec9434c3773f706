#pragma once

// The first-order constraints for the lapse a: solving them for the gradient
// (a_t, a_x), reconstructing a by line integrals, and residual monitoring.

#include <span>
#include <vector>

#include "cuspwave/evolve.hpp"

namespace cuspwave {

struct AGradient {
  Field at;
  Field ax;
};

struct ConstraintReport {
  double t = 0.0;
  double res_momentum = 0.0;
  double res_hamiltonian = 0.0;
  double curl_residual = 0.0;
};

/// Pointwise solve of the Hamiltonian and momentum constraints for (a_t, a_x).
/// Solved in null form. Throws Error(DegenerateConstraintSystem) where
/// (R_t² - R_x²)/R² falls below 1e-10 times its background value 4 sech²(2x).
AGradient solve_a_gradient(const Model& model, const FieldState& s);

/// ∂t of the constraint-solved a_x, by substituting the evolution equations.
Field a_x_rate(const Model& model, const FieldState& s);

/// Residuals with the evolved lapse when the state carries one, otherwise
/// with the constraint-solved gradient (then only the curl is informative).
ConstraintReport residuals(const Model& model, const FieldState& s);

/// Lapse data at t = 0: constraint-solved for Constrained, zero for Free.
LapseFields initial_lapse(const Model& model, const FieldState& s, LapseMode mode);

/// a(t, x) = a(0, x0) + ∫_0^t a_t(s, x0) ds + ∫_{x0}^x a_x(t, ξ) dξ with x0 the
/// left grid end. The time integral uses the trapezoid rule over `ts`.
Field integrate_a(const Grid& grid, std::span<const double> ts, std::span<const double> at_anchor,
                  std::span<const double> ax, double a_anchor0);

/// Sup over x of the difference between the x-then-t and t-then-x line
/// integrals from (0, x0). `at_history[j]` samples a_t over the grid at ts[j].
double path_defect(const Grid& grid, std::span<const double> ts, const std::vector<Field>& at_history,
                   std::span<const double> ax_initial, std::span<const double> ax_final);

}  // namespace cuspwave
