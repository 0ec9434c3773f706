#pragma once

// Evolution of T²-symmetric perturbations of a polarized double cusp.
//
// R is carried exactly: R = R_b + ΔR with ΔR given by D'Alembert's formula
// from the initial bumps. The wave-map pair is evolved as (ΔW, Δq) with
// ΔW = W - W_b and Δq = q - q0 by classical RK4 on the first-order system.
// The lapse perturbation Δa = a - a_b, when carried, rides in the same system.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "cuspwave/background.hpp"
#include "cuspwave/grid.hpp"
#include "cuspwave/jet.hpp"
#include "cuspwave/profile.hpp"

namespace cuspwave {

enum class LapseMode { None, Constrained, Free };
const char* to_string(LapseMode m);
LapseMode parse_lapse_mode(const std::string& s);

struct LapseFields {
  Field da;   // a - a_b
  Field dat;  // ∂t(a - a_b)
};

struct FieldState {
  double t = 0.0;
  Field dW, dWt, dq, dqt;
  std::optional<LapseFields> lapse;
};

/// Exact ΔR from the initial data ΔR(0) = φ, ∂tΔR(0) = ψ:
///   ΔR(t,x) = ½[φ(x+t) + φ(x-t)] + ½∫_{x-t}^{x+t} ψ.
class RPerturbation {
 public:
  // table[a][b] = ∂t^a ∂x^b, a + b ≤ 4
  using Table = std::array<std::array<double, 5>, 5>;

  RPerturbation() = default;
  explicit RPerturbation(const PerturbationSpec& spec);

  bool empty() const { return phi_.empty() && psi_.empty(); }
  double value(double t, double x) const;
  // (ΔR, ∂tΔR, ∂xΔR)
  std::array<double, 3> first(double t, double x) const;
  Table derivatives(double t, double x) const;

  Field phi0(const Grid& grid) const;
  Field psi0(const Grid& grid) const;
  double psi_integral() const;
  // Hull of the initial supports of φ and ψ; (0, 0) when empty.
  std::pair<double, double> support() const;

 private:
  std::vector<Bump> phi_;
  std::vector<Bump> psi_;
};

struct RSample {
  double R = 0.0, Rt = 0.0, Rx = 0.0;
  double Rt_over_R = 0.0, Rx_over_R = 0.0;
  double G = 0.0;  // (R_t² - R_x²) / (4R²)
};

struct RDerivatives {
  RPerturbation::Table d{};      // ∂t^a ∂x^b R (background + perturbation)
  RPerturbation::Table plus{};   // ∂t^a ∂x^b (R_t + R_x), a + b ≤ 3
  RPerturbation::Table minus{};  // ∂t^a ∂x^b (R_t - R_x), a + b ≤ 3, free of cancellation
  double null_background = 0.0;  // (R_bt² - R_bx²) / R_b²
  double R() const { return d[0][0]; }
};

// Second (and optionally third) time derivatives of (ΔW, Δq) obtained by
// substituting the evolution equations.
struct Accelerations {
  Field dWtt, dqtt;
  Field dWttt, dqttt;  // empty unless requested
};

struct ZvFields {
  Field z, zt, v, vt;
};

/// z = R^{1/2} ΔW and v = R^{1/2} e^{-2W} Δq with time derivatives 0..3.
struct ZvJets {
  std::array<Field, 4> z;
  std::array<Field, 4> v;
};

// Inputs for the Δ-equations at one point, generic over doubles and jets.
template <class T>
struct PointInput {
  T dW, dWt, dWx, dWxx;
  T dq, dqt, dqx, dqxx;
  T rt, rx;  // R_t/R and R_x/R
  double Wb = 0.0, Wbx = 0.0;
  double rbx = 0.0;   // R_bx / R_b = 2 tanh(2x)
  double sech2 = 0.0; // G_b
};

template <class T>
T accel_W(const PointInput<T>& in) {
  using std::exp;
  const T e4 = exp(-4.0 * (in.dW + in.Wb));
  return in.dWxx - in.rt * in.dWt + in.rx * in.dWx - 0.5 * (in.dqt * in.dqt - in.dqx * in.dqx) * e4 +
         in.Wbx * (in.rx - in.rbx);
}

template <class T>
T accel_q(const PointInput<T>& in) {
  return in.dqxx - in.rt * in.dqt + in.rx * in.dqx + 4.0 * in.dqt * in.dWt - 4.0 * in.dqx * in.dWx -
         4.0 * in.dqx * in.Wbx;
}

// F(R,W,q) - F(R_b,W_b,q_b) with a_tt - a_xx = F.
template <class T>
T lapse_source(const PointInput<T>& in) {
  using std::exp;
  const T e4 = exp(-4.0 * (in.dW + in.Wb));
  const T dG = 0.25 * (in.rt * in.rt - in.rx * in.rx) - 0.25 * (4.0 - in.rbx * in.rbx);
  return dG - in.dWt * in.dWt + 2.0 * in.Wbx * in.dWx + in.dWx * in.dWx -
         0.25 * (in.dqt * in.dqt - in.dqx * in.dqx) * e4;
}

class Model {
 public:
  Model(Grid grid, BackgroundParams background, PerturbationSpec perturbation);

  const Grid& grid() const { return grid_; }
  const BackgroundParams& background() const { return bg_; }
  const PerturbationSpec& perturbation() const { return pert_; }
  const RPerturbation& r_perturbation() const { return rpert_; }

  // Background sampled on the grid.
  const Field& Wb() const { return Wb_; }
  const Field& Wbx() const { return Wbx_; }
  const Field& tanh2x() const { return tanh2x_; }
  const Field& sech2x() const { return sech2x_; }

  /// Initial (ΔW, ∂tΔW, Δq, ∂tΔq) from the W/Wt/q/qt bumps; no lapse data.
  FieldState initial_state() const;

  /// Throws Error(NonPositiveR) when R ≤ 0.
  RSample eval_R(double t, double x) const;
  RDerivatives eval_R_derivatives(double t, double x) const;

  /// Time derivative of the state; lapse rows present iff the state carries lapse.
  FieldState rhs(const FieldState& s) const;

  /// One classical RK4 step. Throws Error(BlowUp) past |field| > 1e8.
  FieldState step(const FieldState& s, double dt) const;

  /// Same as step, for a state that must carry lapse data.
  FieldState evolve_a(const FieldState& s, double dt) const;

  Accelerations accelerations(const FieldState& s, bool third_order) const;
  Field a_source(const FieldState& s) const;

  ZvFields to_zv(const FieldState& s) const;
  FieldState from_zv(const ZvFields& zv, double t) const;
  ZvJets zv_jets(const FieldState& s) const;

  // Per-point inputs with first spatial derivatives from the stencils.
  struct SpatialDerivatives {
    Field dWx, dWxx, dqx, dqxx;
  };
  SpatialDerivatives spatial(const FieldState& s) const;
  // Half-open index range [lo, hi) outside which the accelerations vanish exactly.
  std::pair<std::size_t, std::size_t> active_range(const FieldState& s) const;

  PointInput<double> point_input(const FieldState& s, const SpatialDerivatives& sd, const RSample& r,
                                 std::size_t i) const;

 private:
  Grid grid_;
  BackgroundParams bg_;
  PerturbationSpec pert_;
  RPerturbation rpert_;
  Field Wb_, Wbx_, tanh2x_, sech2x_;
};

/// Max |value| over all state fields.
double state_sup(const FieldState& s);

}  // namespace cuspwave
