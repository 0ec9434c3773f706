#include "cuspwave/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cuspwave/errors.hpp"

namespace cuspwave {

namespace {

constexpr double kBlowUp = 1e8;

// a*x + y over every field, lapse included when both carry it.
FieldState axpy(double a, const FieldState& x, const FieldState& y) {
  auto comb = [a](const Field& xf, const Field& yf) {
    Field r(yf.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = yf[i] + a * xf[i];
    return r;
  };
  FieldState r;
  r.t = y.t;
  r.dW = comb(x.dW, y.dW);
  r.dWt = comb(x.dWt, y.dWt);
  r.dq = comb(x.dq, y.dq);
  r.dqt = comb(x.dqt, y.dqt);
  if (x.lapse && y.lapse) r.lapse = LapseFields{comb(x.lapse->da, y.lapse->da), comb(x.lapse->dat, y.lapse->dat)};
  return r;
}

template <std::size_t N>
struct RJets {
  Jet<N> R, rt, rx;
};

template <std::size_t N>
RJets<N> r_jets(const RDerivatives& rd) {
  Jet<N> R, Rt, Rx;
  double fact = 1.0;
  for (std::size_t k = 0; k <= N; ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    R.c[k] = rd.d[k][0] / fact;
    Rt.c[k] = rd.d[k + 1][0] / fact;
    Rx.c[k] = rd.d[k][1] / fact;
  }
  return {R, Rt / R, Rx / R};
}

}  // namespace

const char* to_string(LapseMode m) {
  switch (m) {
    case LapseMode::None: return "none";
    case LapseMode::Constrained: return "constrained";
    case LapseMode::Free: return "free";
  }
  return "none";
}

LapseMode parse_lapse_mode(const std::string& s) {
  if (s == "none") return LapseMode::None;
  if (s == "constrained") return LapseMode::Constrained;
  if (s == "free") return LapseMode::Free;
  throw Error(ErrorKind::Parse, "unknown lapse mode '" + s + "'");
}

// ---------------------------------------------------------------------------
// RPerturbation

RPerturbation::RPerturbation(const PerturbationSpec& spec) {
  for (const auto& b : spec.bumps) {
    if (b.target == BumpTarget::R) phi_.push_back(b);
    if (b.target == BumpTarget::Rt) psi_.push_back(b);
  }
}

RPerturbation::Table RPerturbation::derivatives(double t, double x) const {
  // φ^(n)(x±t) for n ≤ 4 and Ψ^(n)(x±t) with Ψ' = ψ.
  std::array<double, 5> pp{}, pm{}, sp{}, sm{};
  for (const auto& b : phi_) {
    const auto a = b.derivatives(x + t), c = b.derivatives(x - t);
    for (int n = 0; n < 5; ++n) {
      pp[n] += a[n];
      pm[n] += c[n];
    }
  }
  for (const auto& b : psi_) {
    const auto a = b.antiderivative_jet(x + t), c = b.antiderivative_jet(x - t);
    for (int n = 0; n < 5; ++n) {
      sp[n] += a[n];
      sm[n] += c[n];
    }
  }
  Table d{};
  for (int a = 0; a <= 4; ++a) {
    const double sgn = (a % 2 == 0) ? 1.0 : -1.0;
    for (int b = 0; a + b <= 4; ++b) {
      const int n = a + b;
      d[a][b] = 0.5 * (pp[n] + sgn * pm[n]) + 0.5 * (sp[n] - sgn * sm[n]);
    }
  }
  return d;
}

std::array<double, 3> RPerturbation::first(double t, double x) const {
  double v = 0.0, vt = 0.0, vx = 0.0;
  for (const auto& b : phi_) {
    const auto a = b.derivatives(x + t), c = b.derivatives(x - t);
    v += 0.5 * (a[0] + c[0]);
    vt += 0.5 * (a[1] - c[1]);
    vx += 0.5 * (a[1] + c[1]);
  }
  for (const auto& b : psi_) {
    const auto a = b.antiderivative_jet(x + t), c = b.antiderivative_jet(x - t);
    v += 0.5 * (a[0] - c[0]);
    vt += 0.5 * (a[1] + c[1]);
    vx += 0.5 * (a[1] - c[1]);
  }
  return {v, vt, vx};
}

double RPerturbation::value(double t, double x) const { return first(t, x)[0]; }

Field RPerturbation::phi0(const Grid& grid) const {
  return grid.sample([this](double x) {
    double s = 0.0;
    for (const auto& b : phi_) s += b.value(x);
    return s;
  });
}

Field RPerturbation::psi0(const Grid& grid) const {
  return grid.sample([this](double x) {
    double s = 0.0;
    for (const auto& b : psi_) s += b.value(x);
    return s;
  });
}

double RPerturbation::psi_integral() const {
  double s = 0.0;
  for (const auto& b : psi_) s += b.integral();
  return s;
}

std::pair<double, double> RPerturbation::support() const {
  if (empty()) return {0.0, 0.0};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto* v : {&phi_, &psi_})
    for (const auto& b : *v) {
      lo = std::min(lo, b.lo());
      hi = std::max(hi, b.hi());
    }
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// Model

Model::Model(Grid grid, BackgroundParams background, PerturbationSpec perturbation)
    : grid_(std::move(grid)), bg_(background), pert_(std::move(perturbation)), rpert_(pert_) {
  bg_.validate();
  pert_.validate();
  const auto n = static_cast<std::size_t>(grid_.size());
  Wb_.resize(n);
  Wbx_.resize(n);
  tanh2x_.resize(n);
  sech2x_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid_.x(static_cast<int>(i));
    const auto b = eval_background_log(0.0, x, bg_);
    Wb_[i] = b.W;
    Wbx_[i] = b.Wx;
    tanh2x_[i] = std::tanh(2.0 * x);
    sech2x_[i] = sech(2.0 * x);
  }
}

FieldState Model::initial_state() const {
  FieldState s;
  s.dW = grid_.sample([this](double x) { return pert_.value(BumpTarget::W, x); });
  s.dWt = grid_.sample([this](double x) { return pert_.value(BumpTarget::Wt, x); });
  s.dq = grid_.sample([this](double x) { return pert_.value(BumpTarget::q, x); });
  s.dqt = grid_.sample([this](double x) { return pert_.value(BumpTarget::qt, x); });
  return s;
}

RSample Model::eval_R(double t, double x) const {
  const auto b = eval_background_log(t, x, bg_);
  RSample r;
  std::array<double, 3> dr{0.0, 0.0, 0.0};
  if (!rpert_.empty()) dr = rpert_.first(t, x);
  if (dr[0] == 0.0 && dr[1] == 0.0 && dr[2] == 0.0) {
    r.Rt_over_R = b.Rt_over_R;
    r.Rx_over_R = b.Rx_over_R;
    const double s = sech(2.0 * x);
    r.G = s * s;
    if (b.log_R < 709.0) {
      r.R = std::exp(b.log_R);
      r.Rt = r.R * r.Rt_over_R;
      r.Rx = r.R * r.Rx_over_R;
    } else {
      r.R = r.Rt = r.Rx = std::numeric_limits<double>::infinity();
    }
    return r;
  }
  if (b.log_R >= 709.0) throw Error(ErrorKind::Overflow, "R not representable at the requested point");
  const double Rb = std::exp(b.log_R);
  r.R = Rb + dr[0];
  if (!(r.R > 0.0)) throw Error(ErrorKind::NonPositiveR, "R <= 0 at t=" + std::to_string(t) + ", x=" + std::to_string(x));
  r.Rt = Rb * b.Rt_over_R + dr[1];
  r.Rx = Rb * b.Rx_over_R + dr[2];
  r.Rt_over_R = r.Rt / r.R;
  r.Rx_over_R = r.Rx / r.R;
  r.G = 0.25 * (r.Rt_over_R * r.Rt_over_R - r.Rx_over_R * r.Rx_over_R);
  return r;
}

RDerivatives Model::eval_R_derivatives(double t, double x) const {
  const auto b = eval_background_log(t, x, bg_);
  if (b.log_R >= 709.0) throw Error(ErrorKind::Overflow, "R not representable at the requested point");
  const double Rb = std::exp(b.log_R);
  const double th = std::tanh(2.0 * x);
  RDerivatives out;
  if (!rpert_.empty()) out.d = rpert_.derivatives(t, x);
  for (int a = 0; a <= 3; ++a)
    for (int k = 0; a + k <= 3; ++k) {
      out.plus[a][k] = out.d[a + 1][k] + out.d[a][k + 1];
      out.minus[a][k] = out.d[a + 1][k] - out.d[a][k + 1];
    }
  for (int a = 0; a <= 4; ++a)
    for (int k = 0; a + k <= 4; ++k) out.d[a][k] += Rb * std::ldexp(1.0, a + k) * ((k % 2 == 0) ? 1.0 : th);
  // (∂t ± ∂x) R_b = 2 R0 e^{2t} e^{±2x}
  const double ep = 2.0 * bg_.R0 * std::exp(2.0 * t + 2.0 * x);
  const double em = 2.0 * bg_.R0 * std::exp(2.0 * t - 2.0 * x);
  for (int a = 0; a <= 3; ++a)
    for (int k = 0; a + k <= 3; ++k) {
      out.plus[a][k] += ep * std::ldexp(1.0, a + k);
      out.minus[a][k] += em * std::ldexp(1.0, a + k) * ((k % 2 == 0) ? 1.0 : -1.0);
    }
  const double sc = sech(2.0 * x);
  out.null_background = 4.0 * sc * sc;
  if (!(out.d[0][0] > 0.0))
    throw Error(ErrorKind::NonPositiveR, "R <= 0 at t=" + std::to_string(t) + ", x=" + std::to_string(x));
  return out;
}

std::pair<std::size_t, std::size_t> Model::active_range(const FieldState& s) const {
  const auto n = static_cast<std::size_t>(grid_.size());
  std::size_t lo = n, hi = 0;
  for (const Field* f : {&s.dW, &s.dWt, &s.dq, &s.dqt}) {
    for (std::size_t i = 0; i < n; ++i)
      if ((*f)[i] != 0.0) {
        lo = std::min(lo, i);
        break;
      }
    for (std::size_t i = n; i-- > 0;)
      if ((*f)[i] != 0.0) {
        hi = std::max(hi, i);
        break;
      }
  }
  if (!rpert_.empty()) {
    const auto [a, b] = rpert_.support();
    const double dx = grid_.dx();
    const double ia = std::floor((a - s.t + grid_.L()) / dx), ib = std::ceil((b + s.t + grid_.L()) / dx);
    lo = std::min(lo, static_cast<std::size_t>(std::clamp(ia, 0.0, static_cast<double>(n - 1))));
    hi = std::max(hi, static_cast<std::size_t>(std::clamp(ib, 0.0, static_cast<double>(n - 1))));
  }
  if (lo > hi) return {1, 1};
  constexpr std::size_t pad = 3;
  lo = lo > pad + 1 ? lo - pad : 1;
  hi = std::min(hi + pad + 1, n - 1);
  return {lo, hi};
}

Model::SpatialDerivatives Model::spatial(const FieldState& s) const {
  return {d1(grid_, s.dW), d2(grid_, s.dW), d1(grid_, s.dq), d2(grid_, s.dq)};
}

PointInput<double> Model::point_input(const FieldState& s, const SpatialDerivatives& sd, const RSample& r,
                                      std::size_t i) const {
  PointInput<double> in;
  in.dW = s.dW[i];
  in.dWt = s.dWt[i];
  in.dWx = sd.dWx[i];
  in.dWxx = sd.dWxx[i];
  in.dq = s.dq[i];
  in.dqt = s.dqt[i];
  in.dqx = sd.dqx[i];
  in.dqxx = sd.dqxx[i];
  in.rt = r.Rt_over_R;
  in.rx = r.Rx_over_R;
  in.Wb = Wb_[i];
  in.Wbx = Wbx_[i];
  in.rbx = 2.0 * tanh2x_[i];
  in.sech2 = sech2x_[i] * sech2x_[i];
  return in;
}

FieldState Model::rhs(const FieldState& s) const {
  const auto n = static_cast<std::size_t>(grid_.size());
  const auto sd = spatial(s);
  FieldState out;
  out.t = s.t;
  out.dW = s.dWt;
  out.dq = s.dqt;
  out.dWt.assign(n, 0.0);
  out.dqt.assign(n, 0.0);
  if (s.lapse) out.lapse = LapseFields{s.lapse->dat, d2(grid_, s.lapse->da)};

  const bool perturbed_R = !rpert_.empty();
  // Outside the active window every term of the accelerations vanishes exactly.
  const auto [i0, i1] = active_range(s);
  for (std::size_t i = i0; i < i1; ++i) {
    const double x = grid_.x(static_cast<int>(i));
    RSample r;
    if (perturbed_R) {
      r = eval_R(s.t, x);
    } else {
      r.Rt_over_R = 2.0;
      r.Rx_over_R = 2.0 * tanh2x_[i];
    }
    const auto in = point_input(s, sd, r, i);
    out.dWt[i] = accel_W(in);
    out.dqt[i] = accel_q(in);
    if (out.lapse) out.lapse->dat[i] += lapse_source(in);
  }
  // Held boundary values.
  for (std::size_t i : {std::size_t{0}, n - 1}) {
    out.dW[i] = out.dWt[i] = out.dq[i] = out.dqt[i] = 0.0;
    if (out.lapse) out.lapse->da[i] = out.lapse->dat[i] = 0.0;
  }
  return out;
}

FieldState Model::step(const FieldState& s, double dt) const {
  const FieldState k1 = rhs(s);
  FieldState y = axpy(0.5 * dt, k1, s);
  y.t = s.t + 0.5 * dt;
  const FieldState k2 = rhs(y);
  y = axpy(0.5 * dt, k2, s);
  y.t = s.t + 0.5 * dt;
  const FieldState k3 = rhs(y);
  y = axpy(dt, k3, s);
  y.t = s.t + dt;
  const FieldState k4 = rhs(y);

  FieldState out = axpy(dt / 6.0, k1, s);
  out = axpy(dt / 3.0, k2, out);
  out = axpy(dt / 3.0, k3, out);
  out = axpy(dt / 6.0, k4, out);
  out.t = s.t + dt;
  const double sup = state_sup(out);
  if (!(sup <= kBlowUp))
    throw Error(ErrorKind::BlowUp, "field magnitude " + std::to_string(sup) + " at t=" + std::to_string(out.t));
  return out;
}

FieldState Model::evolve_a(const FieldState& s, double dt) const {
  if (!s.lapse) throw Error(ErrorKind::InvalidArgument, "evolve_a needs lapse data");
  return step(s, dt);
}

Accelerations Model::accelerations(const FieldState& s, bool third_order) const {
  const auto n = static_cast<std::size_t>(grid_.size());
  const auto sd = spatial(s);
  Accelerations acc;
  acc.dWtt.assign(n, 0.0);
  acc.dqtt.assign(n, 0.0);
  std::vector<RDerivatives> rds;
  if (third_order) rds.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double x = grid_.x(static_cast<int>(i));
    RSample r;
    if (third_order) {
      rds[i] = eval_R_derivatives(s.t, x);
      const auto& d = rds[i].d;
      r.Rt_over_R = d[1][0] / d[0][0];
      r.Rx_over_R = d[0][1] / d[0][0];
    } else {
      r = eval_R(s.t, x);
    }
    const auto in = point_input(s, sd, r, i);
    acc.dWtt[i] = accel_W(in);
    acc.dqtt[i] = accel_q(in);
  }
  if (!third_order) return acc;

  const Field dWtx = d1(grid_, s.dWt), dWtxx = d2(grid_, s.dWt);
  const Field dqtx = d1(grid_, s.dqt), dqtxx = d2(grid_, s.dqt);
  acc.dWttt.assign(n, 0.0);
  acc.dqttt.assign(n, 0.0);
  using J = Jet<1>;
  auto jet = [](double v, double dv) {
    J j(v);
    j.c[1] = dv;
    return j;
  };
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto rj = r_jets<1>(rds[i]);
    PointInput<J> in;
    in.dW = jet(s.dW[i], s.dWt[i]);
    in.dWt = jet(s.dWt[i], acc.dWtt[i]);
    in.dWx = jet(sd.dWx[i], dWtx[i]);
    in.dWxx = jet(sd.dWxx[i], dWtxx[i]);
    in.dq = jet(s.dq[i], s.dqt[i]);
    in.dqt = jet(s.dqt[i], acc.dqtt[i]);
    in.dqx = jet(sd.dqx[i], dqtx[i]);
    in.dqxx = jet(sd.dqxx[i], dqtxx[i]);
    in.rt = rj.rt;
    in.rx = rj.rx;
    in.Wb = Wb_[i];
    in.Wbx = Wbx_[i];
    in.rbx = 2.0 * tanh2x_[i];
    in.sech2 = sech2x_[i] * sech2x_[i];
    acc.dWttt[i] = accel_W(in).derivative(1);
    acc.dqttt[i] = accel_q(in).derivative(1);
  }
  return acc;
}

Field Model::a_source(const FieldState& s) const {
  const auto n = static_cast<std::size_t>(grid_.size());
  const auto sd = spatial(s);
  Field out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = eval_R(s.t, grid_.x(static_cast<int>(i)));
    out[i] = lapse_source(point_input(s, sd, r, i));
  }
  return out;
}

ZvFields Model::to_zv(const FieldState& s) const {
  const auto n = static_cast<std::size_t>(grid_.size());
  ZvFields zv{Field(n), Field(n), Field(n), Field(n)};
  using J = Jet<1>;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = eval_R(s.t, grid_.x(static_cast<int>(i)));
    J R(r.R);
    R.c[1] = r.Rt;
    J dW(s.dW[i]), dq(s.dq[i]);
    dW.c[1] = s.dWt[i];
    dq.c[1] = s.dqt[i];
    const J sq = sqrt(R);
    const J z = sq * dW;
    const J v = sq * exp(-2.0 * (dW + Wb_[i])) * dq;
    zv.z[i] = z.c[0];
    zv.zt[i] = z.c[1];
    zv.v[i] = v.c[0];
    zv.vt[i] = v.c[1];
  }
  return zv;
}

FieldState Model::from_zv(const ZvFields& zv, double t) const {
  const auto n = static_cast<std::size_t>(grid_.size());
  FieldState s;
  s.t = t;
  s.dW.resize(n);
  s.dWt.resize(n);
  s.dq.resize(n);
  s.dqt.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = eval_R(t, grid_.x(static_cast<int>(i)));
    const double sq = std::sqrt(r.R);
    const double half_rt = 0.5 * r.Rt_over_R;
    s.dW[i] = zv.z[i] / sq;
    s.dWt[i] = zv.zt[i] / sq - half_rt * s.dW[i];
    const double P = sq * std::exp(-2.0 * (Wb_[i] + s.dW[i]));
    s.dq[i] = zv.v[i] / P;
    s.dqt[i] = zv.vt[i] / P - (half_rt - 2.0 * s.dWt[i]) * s.dq[i];
  }
  return s;
}

ZvJets Model::zv_jets(const FieldState& s) const {
  const auto n = static_cast<std::size_t>(grid_.size());
  const auto acc = accelerations(s, true);
  ZvJets out;
  for (auto& f : out.z) f.assign(n, 0.0);
  for (auto& f : out.v) f.assign(n, 0.0);
  using J = Jet<3>;
  for (std::size_t i = 0; i < n; ++i) {
    const auto rd = eval_R_derivatives(s.t, grid_.x(static_cast<int>(i)));
    const auto rj = r_jets<3>(rd);
    const J dW = J::from_derivatives(std::array<double, 4>{s.dW[i], s.dWt[i], acc.dWtt[i], acc.dWttt[i]});
    const J dq = J::from_derivatives(std::array<double, 4>{s.dq[i], s.dqt[i], acc.dqtt[i], acc.dqttt[i]});
    const J sq = sqrt(rj.R);
    const J z = sq * dW;
    const J v = sq * exp(-2.0 * (dW + Wb_[i])) * dq;
    for (std::size_t k = 0; k < 4; ++k) {
      out.z[k][i] = z.derivative(k);
      out.v[k][i] = v.derivative(k);
    }
  }
  return out;
}

double state_sup(const FieldState& s) {
  double m = 0.0;
  auto upd = [&m](const Field& f) {
    for (double v : f) {
      if (!std::isfinite(v)) {
        m = std::numeric_limits<double>::infinity();
        return;
      }
      m = std::max(m, std::abs(v));
    }
  };
  upd(s.dW);
  upd(s.dWt);
  upd(s.dq);
  upd(s.dqt);
  if (s.lapse) {
    upd(s.lapse->da);
    upd(s.lapse->dat);
  }
  return m;
}

}  // namespace cuspwave
