#include "cuspwave/background.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

#include "cuspwave/errors.hpp"

namespace cuspwave {

namespace {

constexpr double kLogMax = 709.0;  // just under ln(DBL_MAX)

// arctan(e^{2x}) without overflow for large |x|.
double atan_exp2(double x) {
  if (x <= 0.0) return std::atan(std::exp(2.0 * x));
  return 0.5 * std::numbers::pi - std::atan(std::exp(-2.0 * x));
}

}  // namespace

BackgroundParams::BackgroundParams(double R0_, double W0_, double W1_, double q0_, double a0_)
    : R0(R0_), W0(W0_), W1(W1_), q0(q0_), a0(a0_) {
  validate();
}

void BackgroundParams::validate() const {
  if (!(R0 > 0.0) || !std::isfinite(R0)) throw Error(ErrorKind::InvalidArgument, "R0 must be positive");
  if (W0 == 0.0 || !std::isfinite(W0)) throw Error(ErrorKind::InvalidArgument, "W0 must be nonzero");
  if (!std::isfinite(W1) || !std::isfinite(q0) || !std::isfinite(a0))
    throw Error(ErrorKind::InvalidArgument, "background offsets must be finite");
}

double log_cosh(double y) {
  const double ay = std::abs(y);
  return ay + std::log1p(std::exp(-2.0 * ay)) - std::numbers::ln2;
}

double sech(double y) {
  const double ay = std::abs(y);
  if (ay > 20.0) {
    const double e = std::exp(-ay);
    return 2.0 * e / (1.0 + e * e);
  }
  return 1.0 / std::cosh(y);
}

BackgroundLog eval_background_log(double t, double x, const BackgroundParams& p) {
  BackgroundLog b;
  const double th = std::tanh(2.0 * x);
  const double sh = sech(2.0 * x);
  b.log_R = std::log(p.R0) + 2.0 * t + log_cosh(2.0 * x);
  b.Rt_over_R = 2.0;
  b.Rx_over_R = 2.0 * th;
  b.Rxx_over_R = 4.0;
  b.Rtx_over_R = 4.0 * th;
  b.W = p.W1 + p.W0 * atan_exp2(x);
  b.Wx = p.W0 * sh;
  b.Wxx = -2.0 * p.W0 * sh * th;
  b.q = p.q0;
  b.a = p.a0 - 0.5 * p.alpha() * log_cosh(2.0 * x) + p.beta() * t;
  b.at = p.beta();
  b.ax = -p.alpha() * th;
  b.axx = -2.0 * p.alpha() * sh * sh;
  return b;
}

BackgroundPoint eval_background(double t, double x, const BackgroundParams& p) {
  const BackgroundLog b = eval_background_log(t, x, p);
  if (b.log_R > kLogMax) throw Error(ErrorKind::Overflow, "R_b is not representable at this (t, x)");
  BackgroundPoint r;
  r.R = std::exp(b.log_R);
  r.W = b.W;
  r.q = b.q;
  r.a = b.a;
  r.Rt = b.Rt_over_R * r.R;
  r.Rx = b.Rx_over_R * r.R;
  r.Wx = b.Wx;
  r.at = b.at;
  r.ax = b.ax;
  r.Rtt = 4.0 * r.R;
  r.Rxx = b.Rxx_over_R * r.R;
  r.Rtx = b.Rtx_over_R * r.R;
  r.Wxx = b.Wxx;
  r.att = 0.0;
  r.axx = b.axx;
  return r;
}

double BackgroundResiduals::max_abs() const {
  return std::max({std::abs(wave_R), std::abs(wave_W), std::abs(wave_q), std::abs(wave_a), std::abs(hamiltonian),
                   std::abs(momentum)});
}

BackgroundResiduals background_residuals(double t, double x, const BackgroundParams& p) {
  const BackgroundLog b = eval_background_log(t, x, p);
  // Background is t-independent in W and q; all R-terms enter as ratios.
  const double Rt = b.Rt_over_R, Rx = b.Rx_over_R;
  const double Rtt = 4.0, Rxx = b.Rxx_over_R, Rtx = b.Rtx_over_R;
  const double Wt = 0.0, Wtt = 0.0, qt = 0.0, qx = 0.0, qtt = 0.0, qxx = 0.0;
  const double e4 = std::exp(-4.0 * b.W);
  const double att = 0.0;

  BackgroundResiduals r;
  r.wave_R = Rxx - Rtt;
  r.wave_W = Wtt - b.Wxx + Rt * Wt - Rx * b.Wx + 0.5 * (qt * qt - qx * qx) * e4;
  r.wave_q = qtt - qxx + Rt * qt - Rx * qx - 4.0 * qt * Wt + 4.0 * qx * b.Wx;
  r.wave_a = att - b.axx + 0.25 * (Rx * Rx - Rt * Rt) + Wt * Wt - b.Wx * b.Wx + 0.25 * (qt * qt - qx * qx) * e4;
  r.hamiltonian = b.at * Rt + b.ax * Rx + 0.25 * (Rx * Rx + Rt * Rt) - Rxx - (b.Wx * b.Wx + Wt * Wt) -
                  0.25 * e4 * (qx * qx + qt * qt);
  r.momentum = b.ax * Rt + b.at * Rx - Rtx + 0.5 * Rx * Rt - 2.0 * Wt * b.Wx - 0.5 * e4 * qx * qt;
  return r;
}

std::pair<double, double> coords_prime(double t, double x, double W0) {
  if (W0 == 0.0) throw Error(ErrorKind::InvalidArgument, "W0 must be nonzero");
  const double al = 0.5 + 0.5 * W0 * W0;
  const double be = 1.5 + 0.5 * W0 * W0;
  return {-al * x + be * t, -al * t + be * x};
}

std::pair<double, double> coords_prime_inverse(double tp, double xp, double W0) {
  if (W0 == 0.0) throw Error(ErrorKind::InvalidArgument, "W0 must be nonzero");
  const double al = 0.5 + 0.5 * W0 * W0;
  const double be = 1.5 + 0.5 * W0 * W0;
  const double det = be * be - al * al;
  return {(be * tp + al * xp) / det, (al * tp + be * xp) / det};
}

std::pair<double, double> coords_RV(double t, double x, double R0) {
  if (!(R0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "R0 must be positive");
  const double log_scale = std::log(R0) + 2.0 * t + log_cosh(2.0 * x);
  if (log_scale > kLogMax) throw Error(ErrorKind::Overflow, "(R, V) not representable at this (t, x)");
  const double scale = R0 * std::exp(2.0 * t);
  return {scale * std::cosh(2.0 * x), scale * std::sinh(2.0 * x)};
}

UhpPoint to_uhp(double W, double q) { return {q, std::exp(2.0 * W)}; }

std::pair<double, double> from_uhp(const UhpPoint& p) { return {0.5 * std::log(p.s), p.u}; }

double h_distance(const UhpPoint& a, const UhpPoint& b) {
  const double du = a.u - b.u, ds = a.s - b.s;
  const double arg = (du * du + ds * ds) / (2.0 * a.s * b.s);
  // acosh(1 + arg) without cancellation for small arg
  return std::log1p(arg + std::sqrt(arg * (arg + 2.0)));
}

double h_length(std::span<const double> W, std::span<const double> q) {
  if (W.size() != q.size()) throw Error(ErrorKind::InvalidArgument, "curve components differ in length");
  double len = 0.0;
  for (std::size_t i = 1; i < W.size(); ++i) len += h_distance(to_uhp(W[i - 1], q[i - 1]), to_uhp(W[i], q[i]));
  return len;
}

Isometry::Isometry(double a, double b, double c, double d) : m_{a, b, c, d} {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d))
    throw Error(ErrorKind::InvalidArgument, "isometry entries must be finite");
  if (std::abs(det() - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "isometry determinant must be 1");
}

Isometry Isometry::normalized(double a, double b, double c, double d) {
  const double det = a * d - b * c;
  if (!(det > 0.0)) throw Error(ErrorKind::InvalidArgument, "isometry matrix needs a positive determinant");
  const double s = 1.0 / std::sqrt(det);
  Isometry iso;
  iso.m_ = {a * s, b * s, c * s, d * s};
  return iso;
}

std::complex<double> Isometry::apply(std::complex<double> z) const {
  return (m_[0] * z + m_[1]) / (m_[2] * z + m_[3]);
}

std::complex<double> Isometry::derivative(std::complex<double> z) const {
  const std::complex<double> den = m_[2] * z + m_[3];
  return 1.0 / (den * den);
}

Isometry Isometry::operator*(const Isometry& r) const {
  Isometry out;
  const auto& a = m_;
  const auto& b = r.m_;
  out.m_ = {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
  return out;
}

WqFields apply_isometry(const Isometry& iso, const WqFields& f) {
  if (std::abs(iso.det() - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "isometry determinant must be 1");
  if (f.W.size() != f.q.size()) throw Error(ErrorKind::InvalidArgument, "W and q differ in length");
  const bool with_rates = !f.Wt.empty();
  if (with_rates && (f.Wt.size() != f.W.size() || f.qt.size() != f.W.size()))
    throw Error(ErrorKind::InvalidArgument, "time derivatives differ in length");

  WqFields out;
  out.W.resize(f.W.size());
  out.q.resize(f.W.size());
  if (with_rates) {
    out.Wt.resize(f.W.size());
    out.qt.resize(f.W.size());
  }
  for (std::size_t i = 0; i < f.W.size(); ++i) {
    if (!std::isfinite(f.W[i]) || !std::isfinite(f.q[i]))
      throw Error(ErrorKind::InvalidArgument, "fields must be finite");
    const std::complex<double> z = to_uhp(f.W[i], f.q[i]).z();
    const std::complex<double> w = iso.apply(z);
    out.W[i] = 0.5 * std::log(w.imag());
    out.q[i] = w.real();
    if (with_rates) {
      // ds = 2 s dW in the source, dW' = ds' / (2 s') in the image
      const std::complex<double> dz(f.qt[i], 2.0 * z.imag() * f.Wt[i]);
      const std::complex<double> dw = iso.derivative(z) * dz;
      out.Wt[i] = dw.imag() / (2.0 * w.imag());
      out.qt[i] = dw.real();
    }
  }
  return out;
}

double geodesic_residual(std::span<const double> W, std::span<const double> q, const Grid& grid) {
  const Field Wx = d1(grid, W), Wxx = d2(grid, W);
  const Field qx = d1(grid, q), qxx = d2(grid, q);
  double res = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double th = std::tanh(2.0 * grid.x(i));
    const double e4 = std::exp(-4.0 * W[k]);
    const double rW = Wxx[k] + 2.0 * th * Wx[k] + 0.5 * e4 * qx[k] * qx[k];
    const double rq = qxx[k] + 2.0 * th * qx[k] - 4.0 * Wx[k] * qx[k];
    res = std::max({res, std::abs(rW), std::abs(rq)});
  }
  return res;
}

}  // namespace cuspwave
