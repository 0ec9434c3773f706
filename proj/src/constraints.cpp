#include "cuspwave/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cuspwave/errors.hpp"

namespace cuspwave {

namespace {

constexpr double kDegenerate = 1e-10;

// Point values entering the constraints, generic over doubles and jets.
template <class T>
struct ConstraintInput {
  T W, Wt, Wx, qt, qx;
  T rt, rx, rxx, rtx;  // R_t/R, R_x/R, R_xx/R, R_tx/R
  T rp, rm;            // (R_t ± R_x)/R
  T rpx, rmx;          // ∂x(R_t ± R_x)/R
  double disc_b = 1.0; // background value of rp·rm
};

// Right-hand sides H, P of  rt a_t + rx a_x = H,  rx a_t + rt a_x = P.
template <class T>
std::pair<T, T> constraint_rhs(const ConstraintInput<T>& c) {
  using std::exp;
  const T e4 = exp(-4.0 * c.W);
  const T H = c.rxx + c.Wx * c.Wx + c.Wt * c.Wt + 0.25 * e4 * (c.qx * c.qx + c.qt * c.qt) -
              0.25 * (c.rx * c.rx + c.rt * c.rt);
  const T P = c.rtx - 0.5 * c.rx * c.rt + 2.0 * c.Wt * c.Wx + 0.5 * e4 * c.qx * c.qt;
  return {H, P};
}

// Null form: (a_t + a_x) rp = H + P and (a_t - a_x) rm = H - P, with both
// right-hand sides assembled without cancellation.
template <class T>
std::pair<T, T> solve(const ConstraintInput<T>& c) {
  using std::exp;
  const double disc = value_of(c.rp) * value_of(c.rm);
  if (!(disc >= kDegenerate * c.disc_b))
    throw Error(ErrorKind::DegenerateConstraintSystem, "(R_t^2 - R_x^2)/R^2 below 1e-10 of its background value");
  const T e4 = exp(-4.0 * c.W);
  const T wm = c.Wt - c.Wx, wp = c.Wt + c.Wx;
  const T qp = c.qt + c.qx, qm = c.qt - c.qx;
  const T sp = c.rpx + wp * wp + 0.25 * e4 * qp * qp - 0.25 * c.rp * c.rp;
  const T sm = -1.0 * c.rmx + wm * wm + 0.25 * e4 * qm * qm - 0.25 * c.rm * c.rm;
  const T up = sp / c.rp, um = sm / c.rm;
  return {0.5 * (up + um), 0.5 * (up - um)};
}

ConstraintInput<double> point(const Model& m, const FieldState& s, const Field& dWx, const Field& dqx,
                              const RDerivatives& rd, std::size_t i) {
  const double R = rd.R();
  ConstraintInput<double> c;
  c.W = m.Wb()[i] + s.dW[i];
  c.Wt = s.dWt[i];
  c.Wx = m.Wbx()[i] + dWx[i];
  c.qt = s.dqt[i];
  c.qx = dqx[i];
  c.rt = rd.d[1][0] / R;
  c.rx = rd.d[0][1] / R;
  c.rxx = rd.d[0][2] / R;
  c.rtx = rd.d[1][1] / R;
  c.rp = rd.plus[0][0] / R;
  c.rm = rd.minus[0][0] / R;
  c.rpx = rd.plus[0][1] / R;
  c.rmx = rd.minus[0][1] / R;
  c.disc_b = rd.null_background;
  return c;
}

}  // namespace

AGradient solve_a_gradient(const Model& model, const FieldState& s) {
  const auto& grid = model.grid();
  const auto n = static_cast<std::size_t>(grid.size());
  const Field dWx = d1(grid, s.dW), dqx = d1(grid, s.dq);
  AGradient g{Field(n), Field(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto rd = model.eval_R_derivatives(s.t, grid.x(static_cast<int>(i)));
    std::tie(g.at[i], g.ax[i]) = solve(point(model, s, dWx, dqx, rd, i));
  }
  return g;
}

Field a_x_rate(const Model& model, const FieldState& s) {
  const auto& grid = model.grid();
  const auto n = static_cast<std::size_t>(grid.size());
  const auto acc = model.accelerations(s, false);
  const Field dWx = d1(grid, s.dW), dqx = d1(grid, s.dq);
  const Field dWtx = d1(grid, s.dWt), dqtx = d1(grid, s.dqt);
  using J = Jet<1>;
  auto jet = [](double v, double dv) {
    J j(v);
    j.c[1] = dv;
    return j;
  };
  Field out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto rd = model.eval_R_derivatives(s.t, grid.x(static_cast<int>(i)));
    const auto& d = rd.d;
    const J R = jet(d[0][0], d[1][0]);
    ConstraintInput<J> c;
    c.W = jet(model.Wb()[i] + s.dW[i], s.dWt[i]);
    c.Wt = jet(s.dWt[i], acc.dWtt[i]);
    c.Wx = jet(model.Wbx()[i] + dWx[i], dWtx[i]);
    c.qt = jet(s.dqt[i], acc.dqtt[i]);
    c.qx = jet(dqx[i], dqtx[i]);
    c.rt = jet(d[1][0], d[2][0]) / R;
    c.rx = jet(d[0][1], d[1][1]) / R;
    c.rxx = jet(d[0][2], d[1][2]) / R;
    c.rtx = jet(d[1][1], d[2][1]) / R;
    c.rp = jet(rd.plus[0][0], rd.plus[1][0]) / R;
    c.rm = jet(rd.minus[0][0], rd.minus[1][0]) / R;
    c.rpx = jet(rd.plus[0][1], rd.plus[1][1]) / R;
    c.rmx = jet(rd.minus[0][1], rd.minus[1][1]) / R;
    c.disc_b = rd.null_background;
    out[i] = solve(c).second.derivative(1);
  }
  return out;
}

ConstraintReport residuals(const Model& model, const FieldState& s) {
  const auto& grid = model.grid();
  const auto n = static_cast<std::size_t>(grid.size());
  ConstraintReport rep;
  rep.t = s.t;
  const Field dWx = d1(grid, s.dW), dqx = d1(grid, s.dq);

  Field at(n), ax(n);
  if (s.lapse) {
    const Field dax = d1(grid, s.lapse->da);
    for (std::size_t i = 0; i < n; ++i) {
      const auto b = eval_background_log(s.t, grid.x(static_cast<int>(i)), model.background());
      at[i] = b.at + s.lapse->dat[i];
      ax[i] = b.ax + dax[i];
    }
  } else {
    auto g = solve_a_gradient(model, s);
    at = std::move(g.at);
    ax = std::move(g.ax);
  }

  // The two outermost points on each side are the held boundary layer.
  const std::size_t lo = std::min<std::size_t>(2, n), hi = n > 2 ? n - 2 : 0;
  for (std::size_t i = lo; i < hi; ++i) {
    const auto rd = model.eval_R_derivatives(s.t, grid.x(static_cast<int>(i)));
    const auto c = point(model, s, dWx, dqx, rd, i);
    const auto [H, P] = constraint_rhs(c);
    rep.res_hamiltonian = std::max(rep.res_hamiltonian, std::abs(c.rt * at[i] + c.rx * ax[i] - H));
    rep.res_momentum = std::max(rep.res_momentum, std::abs(c.rx * at[i] + c.rt * ax[i] - P));
  }

  const Field axt = a_x_rate(model, s);
  const Field atx = d1(grid, at);
  for (std::size_t i = lo; i < hi; ++i) rep.curl_residual = std::max(rep.curl_residual, std::abs(axt[i] - atx[i]));
  return rep;
}

LapseFields initial_lapse(const Model& model, const FieldState& s, LapseMode mode) {
  const auto& grid = model.grid();
  const auto n = static_cast<std::size_t>(grid.size());
  LapseFields lf{Field(n, 0.0), Field(n, 0.0)};
  if (mode != LapseMode::Constrained) return lf;
  const auto g = solve_a_gradient(model, s);
  Field dax(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = eval_background_log(s.t, grid.x(static_cast<int>(i)), model.background());
    lf.dat[i] = g.at[i] - b.at;
    dax[i] = g.ax[i] - b.ax;
  }
  lf.da = cumulative_integral(grid, dax);
  return lf;
}

namespace {

double time_integral(std::span<const double> ts, std::span<const double> f) {
  if (ts.size() != f.size()) throw Error(ErrorKind::InvalidArgument, "time series length mismatch");
  double s = 0.0;
  for (std::size_t j = 1; j < ts.size(); ++j) s += 0.5 * (ts[j] - ts[j - 1]) * (f[j] + f[j - 1]);
  return s;
}

}  // namespace

Field integrate_a(const Grid& grid, std::span<const double> ts, std::span<const double> at_anchor,
                  std::span<const double> ax, double a_anchor0) {
  const double base = a_anchor0 + time_integral(ts, at_anchor);
  Field a = cumulative_integral(grid, ax);
  for (auto& v : a) v += base;
  return a;
}

double path_defect(const Grid& grid, std::span<const double> ts, const std::vector<Field>& at_history,
                   std::span<const double> ax_initial, std::span<const double> ax_final) {
  if (at_history.size() != ts.size()) throw Error(ErrorKind::InvalidArgument, "a_t history length mismatch");
  const auto n = static_cast<std::size_t>(grid.size());
  const Field x_first = cumulative_integral(grid, ax_initial);
  const Field x_last = cumulative_integral(grid, ax_final);
  std::vector<double> column(ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) column[j] = at_history[j][0];
  const double anchor = time_integral(ts, column);
  double defect = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < ts.size(); ++j) column[j] = at_history[j][i];
    const double path1 = x_first[i] + time_integral(ts, column);
    const double path2 = anchor + x_last[i];
    defect = std::max(defect, std::abs(path1 - path2));
  }
  return defect;
}

}  // namespace cuspwave
