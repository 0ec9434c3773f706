#pragma once

// Closed-form double-cusp background and the geometry of its target, the
// hyperbolic plane with metric h = 4 dW^2 + e^{-4W} dq^2.

#include <array>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "cuspwave/grid.hpp"

namespace cuspwave {

struct BackgroundParams {
  double R0 = 1.0;
  double W0 = 1.0;
  double W1 = 0.0;
  double q0 = 0.0;
  double a0 = 0.0;

  BackgroundParams() = default;
  BackgroundParams(double R0_, double W0_, double W1_ = 0.0, double q0_ = 0.0, double a0_ = 0.0);

  void validate() const;

  // Coefficients of the lapse: a_b = a0 - (alpha/2) ln cosh(2x) + beta t.
  double alpha() const { return 0.5 + 0.5 * W0 * W0; }
  double beta() const { return 1.5 + 0.5 * W0 * W0; }
};

/// Background evaluated without forming R itself; never overflows.
struct BackgroundLog {
  double log_R = 0.0;
  double Rt_over_R = 0.0;
  double Rx_over_R = 0.0;
  double Rxx_over_R = 0.0;
  double Rtx_over_R = 0.0;
  double W = 0.0, Wx = 0.0, Wxx = 0.0;
  double q = 0.0;
  double a = 0.0, at = 0.0, ax = 0.0, axx = 0.0;
};

struct BackgroundPoint {
  double R = 0.0, W = 0.0, q = 0.0, a = 0.0;
  double Rt = 0.0, Rx = 0.0, Wx = 0.0, at = 0.0, ax = 0.0;
  // second partials, for the residual checks
  double Rtt = 0.0, Rxx = 0.0, Rtx = 0.0, Wxx = 0.0, att = 0.0, axx = 0.0;
};

double log_cosh(double y);
double sech(double y);

BackgroundLog eval_background_log(double t, double x, const BackgroundParams& p);

/// Throws Error(Overflow) when R_b is not representable as a double.
BackgroundPoint eval_background(double t, double x, const BackgroundParams& p);

// Residuals of the field equations and constraints for the background at
// (t, x), each normalized by R where R appears. Used by verify-background.
struct BackgroundResiduals {
  double wave_R = 0.0;      // (R_xx - R_tt) / R
  double wave_W = 0.0;
  double wave_q = 0.0;
  double wave_a = 0.0;
  double hamiltonian = 0.0;  // constraint with a_t R_t/R + a_x R_x/R
  double momentum = 0.0;     // constraint with a_x R_t/R + a_t R_x/R
  double max_abs() const;
};
BackgroundResiduals background_residuals(double t, double x, const BackgroundParams& p);

// Coordinates adapted to the right end.
std::pair<double, double> coords_prime(double t, double x, double W0);
std::pair<double, double> coords_prime_inverse(double tp, double xp, double W0);

// Conjugate null-adapted pair (R, V); throws Error(Overflow) if not representable.
std::pair<double, double> coords_RV(double t, double x, double R0);

/// Point in the (q, -W) chart of the hyperbolic plane.
struct HyperbolicPoint {
  double u = 0.0;  // = q
  double y = 0.0;  // = -W
};

/// Upper-half-plane coordinates (u, s) = (q, e^{2W}), s > 0.
struct UhpPoint {
  double u = 0.0;
  double s = 1.0;
  std::complex<double> z() const { return {u, s}; }
};

UhpPoint to_uhp(double W, double q);
std::pair<double, double> from_uhp(const UhpPoint& p);  // (W, q)

// Geodesic distance in the upper half plane (equal to the h-distance).
double h_distance(const UhpPoint& a, const UhpPoint& b);

// Sum of h-distances between consecutive samples of a curve (W(x), q(x)).
double h_length(std::span<const double> W, std::span<const double> q);

/// Orientation-preserving isometry z -> (a z + b) / (c z + d), det = 1.
class Isometry {
 public:
  Isometry() = default;
  // Rejects |det - 1| > 1e-9.
  Isometry(double a, double b, double c, double d);
  // Rescales any positive-determinant matrix to determinant one.
  static Isometry normalized(double a, double b, double c, double d);

  const std::array<double, 4>& matrix() const { return m_; }
  double det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

  std::complex<double> apply(std::complex<double> z) const;
  // Derivative of the Möbius map at z (pushforward of tangent vectors).
  std::complex<double> derivative(std::complex<double> z) const;

  Isometry operator*(const Isometry& rhs) const;  // composition (this ∘ rhs)

 private:
  std::array<double, 4> m_{1.0, 0.0, 0.0, 1.0};
};

struct WqFields {
  Field W, q;
  Field Wt, qt;  // optional time derivatives; empty when not transported
};

/// Applies the isometry pointwise in UHP coordinates. Time derivatives, when
/// present, are pushed forward with the Möbius derivative.
WqFields apply_isometry(const Isometry& iso, const WqFields& fields);

/// Sup norm of the Euler-Lagrange residual of F = ∫ |γ'|_h^2 cosh(2x) dx.
double geodesic_residual(std::span<const double> W, std::span<const double> q, const Grid& grid);

}  // namespace cuspwave
