#pragma once

// Norms and energies of a perturbation snapshot.

#include <array>
#include <string>
#include <vector>

#include "cuspwave/constraints.hpp"
#include "cuspwave/evolve.hpp"

namespace cuspwave {

struct EnergyReport {
  double t = 0.0;
  std::array<double, 4> m{};           // m_0 .. m_3
  std::array<double, 4> Mtilde{};      // index k = 1..3 (index 0 unused), weight cosh(2x)
  std::array<double, 4> Mtilde_p2{};   // same with weight cosh^2(2x)
  double E = 0.0, A_cal = 0.0, E1 = 0.0, calE1 = 0.0, E2 = 0.0, calE2 = 0.0;
  double S = 0.0;
  double sup_null_A = 0.0, sup_null_B = 0.0;
  double sup_dW = 0.0, sup_dq = 0.0;
  double res_momentum = 0.0, res_hamiltonian = 0.0, curl_residual = 0.0;
  double sup_da = 0.0;

  static const std::vector<std::string>& columns();
  std::vector<double> values() const;  // same order as columns()
  // Value by column name; throws Error(InvalidArgument) for unknown names.
  double get(const std::string& column) const;
};

/// m_0..m_3 at time t: sup norms of x-derivatives of ΔR (orders ≤ k) and of
/// ΔR_t (orders ≤ k-1; m_0 also carries sup|ΔR_t|). Sampled at four points
/// per grid cell.
std::array<double, 4> m_norms(const Model& model, double t);
double m_k(const Model& model, double t, int k);

/// (Σ_{i≤k} ∫ (f^{(i)})² cosh^p(2x) dx)^{1/2}.
double weighted_norm(const Grid& grid, const Field& f, int k, int p);

/// M̃_k for k = 1..3 (index 0 unused) with weight cosh^p(2x).
std::array<double, 4> mtilde_norms(const Grid& grid, const FieldState& s, int p);
double Mtilde_k(const Grid& grid, const FieldState& s, int k, int p = 1);

/// E = ½∫ z_t² + z_x² + z² G_b.
double energy_E(const Grid& grid, const Field& z, const Field& zt);

/// E^α for α = (m, n), m + n ≤ 2: E applied to ∂t^m ∂x^n z.
double energy_E_alpha(const Grid& grid, const ZvJets& jets, int m, int n);

/// E[f, g] for the coupled pair, with the v-weight G_b + 4 W_bx².
double energy_pair(const Model& model, const Field& f, const Field& ft, const Field& g, const Field& gt);

struct EnergyHierarchy {
  double E = 0.0, A_cal = 0.0, E1 = 0.0, calE1 = 0.0, E2 = 0.0, calE2 = 0.0;
};
EnergyHierarchy energy_hierarchy(const Model& model, const ZvJets& jets);

double functional_S(const Model& model, const FieldState& s);

struct NullQuantities {
  Field A, B;
};
NullQuantities null_quantities(const Model& model, const FieldState& s);

/// Every diagnostic of one snapshot, constraint residuals included.
EnergyReport make_report(const Model& model, const FieldState& s);

}  // namespace cuspwave
