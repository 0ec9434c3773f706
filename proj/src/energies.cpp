#include "cuspwave/energies.hpp"

#include <algorithm>
#include <cmath>

#include "cuspwave/errors.hpp"

namespace cuspwave {

const std::vector<std::string>& EnergyReport::columns() {
  static const std::vector<std::string> cols = {
      "t",          "m0",          "m1",          "m2",          "m3",          "Mtilde1",
      "Mtilde2",    "Mtilde3",     "Mtilde_p2_1", "Mtilde_p2_2", "Mtilde_p2_3", "E",
      "A_cal",      "E1",          "calE1",       "E2",          "calE2",       "S",
      "sup_null_A", "sup_null_B",  "sup_dW",      "sup_dq",      "res_momentum", "res_hamiltonian",
      "curl_residual", "sup_da"};
  return cols;
}

std::vector<double> EnergyReport::values() const {
  return {t,     m[0],   m[1],       m[2],       m[3],         Mtilde[1],  Mtilde[2],
          Mtilde[3], Mtilde_p2[1], Mtilde_p2[2], Mtilde_p2[3], E,  A_cal,      E1,
          calE1, E2,     calE2,      S,          sup_null_A,   sup_null_B, sup_dW,
          sup_dq, res_momentum, res_hamiltonian, curl_residual, sup_da};
}

double EnergyReport::get(const std::string& column) const {
  const auto& cols = columns();
  const auto it = std::find(cols.begin(), cols.end(), column);
  if (it == cols.end()) throw Error(ErrorKind::InvalidArgument, "unknown report column '" + column + "'");
  return values()[static_cast<std::size_t>(it - cols.begin())];
}

std::array<double, 4> m_norms(const Model& model, double t) {
  std::array<double, 4> m{};
  const auto& rp = model.r_perturbation();
  if (rp.empty()) return m;
  const auto& grid = model.grid();
  const auto [lo, hi] = rp.support();
  const double h = grid.dx() / 4.0;
  const double L = grid.L();
  const long n = 4L * (grid.size() - 1);
  const long j0 = std::max(0L, static_cast<long>(std::floor((lo - t + L) / h)));
  const long j1 = std::min(n, static_cast<long>(std::ceil((hi + t + L) / h)));
  // sups of ∂x^j ΔR (j ≤ 3) and ∂x^j ΔR_t (j ≤ 2)
  std::array<double, 4> sR{};
  std::array<double, 3> sRt{};
  for (long j = j0; j <= j1; ++j) {
    const double x = (j == n) ? L : -L + static_cast<double>(j) * h;
    const auto d = rp.derivatives(t, x);
    for (int k = 0; k < 4; ++k) sR[k] = std::max(sR[k], std::abs(d[0][k]));
    for (int k = 0; k < 3; ++k) sRt[k] = std::max(sRt[k], std::abs(d[1][k]));
  }
  m[0] = sR[0] + sRt[0];
  for (int k = 1; k < 4; ++k) {
    double s = 0.0;
    for (int j = 0; j <= k; ++j) s += sR[j];
    for (int j = 0; j <= k - 1; ++j) s += sRt[j];
    m[k] = s;
  }
  return m;
}

double m_k(const Model& model, double t, int k) {
  if (k < 0 || k > 3) throw Error(ErrorKind::InvalidArgument, "m_k needs 0 <= k <= 3");
  return m_norms(model, t)[static_cast<std::size_t>(k)];
}

namespace {

Field cosh_weight(const Grid& grid, int p) {
  return grid.sample([p](double x) { return p == 0 ? 1.0 : std::pow(std::cosh(2.0 * x), p); });
}

// ∫ (f^{(i)})² w for i = 0..k.
std::vector<double> squared_derivative_integrals(const Grid& grid, const Field& f, int k, const Field& w) {
  std::vector<double> out;
  Field g = f;
  for (int i = 0; i <= k; ++i) {
    if (i > 0) g = d1(grid, g);
    Field sq(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) sq[j] = g[j] * g[j] * w[j];
    out.push_back(integrate(grid, sq).value);
  }
  return out;
}

double partial_norm(const std::vector<double>& ints, int k) {
  double s = 0.0;
  for (int i = 0; i <= k; ++i) s += ints[static_cast<std::size_t>(i)];
  return std::sqrt(s);
}

}  // namespace

double weighted_norm(const Grid& grid, const Field& f, int k, int p) {
  if (k < 0 || p < 0) throw Error(ErrorKind::InvalidArgument, "weighted_norm needs k, p >= 0");
  return partial_norm(squared_derivative_integrals(grid, f, k, cosh_weight(grid, p)), k);
}

std::array<double, 4> mtilde_norms(const Grid& grid, const FieldState& s, int p) {
  const Field w = cosh_weight(grid, p);
  const auto iW = squared_derivative_integrals(grid, s.dW, 3, w);
  const auto iWt = squared_derivative_integrals(grid, s.dWt, 2, w);
  const auto iq = squared_derivative_integrals(grid, s.dq, 3, w);
  const auto iqt = squared_derivative_integrals(grid, s.dqt, 2, w);
  std::array<double, 4> out{};
  for (int k = 1; k <= 3; ++k)
    out[static_cast<std::size_t>(k)] =
        partial_norm(iW, k) + partial_norm(iWt, k - 1) + partial_norm(iq, k) + partial_norm(iqt, k - 1);
  return out;
}

double Mtilde_k(const Grid& grid, const FieldState& s, int k, int p) {
  if (k < 1 || k > 3) throw Error(ErrorKind::InvalidArgument, "Mtilde_k needs 1 <= k <= 3");
  return mtilde_norms(grid, s, p)[static_cast<std::size_t>(k)];
}

namespace {

double half_energy(const Grid& grid, const Field& f, const Field& ft, const Field& weight) {
  const Field fx = d1(grid, f);
  Field e(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) e[i] = ft[i] * ft[i] + fx[i] * fx[i] + f[i] * f[i] * weight[i];
  return 0.5 * integrate(grid, e).value;
}

Field Gb(const Grid& grid) {
  return grid.sample([](double x) {
    const double s = sech(2.0 * x);
    return s * s;
  });
}

}  // namespace

double energy_E(const Grid& grid, const Field& z, const Field& zt) { return half_energy(grid, z, zt, Gb(grid)); }

double energy_E_alpha(const Grid& grid, const ZvJets& jets, int m, int n) {
  if (m < 0 || n < 0 || m + n > 2) throw Error(ErrorKind::InvalidArgument, "E^alpha needs |alpha| <= 2");
  const auto um = static_cast<std::size_t>(m);
  const Field f = n == 0 ? jets.z[um] : dn(grid, jets.z[um], n);
  const Field ft = n == 0 ? jets.z[um + 1] : dn(grid, jets.z[um + 1], n);
  return energy_E(grid, f, ft);
}

double energy_pair(const Model& model, const Field& f, const Field& ft, const Field& g, const Field& gt) {
  const auto& grid = model.grid();
  const Field gb = Gb(grid);
  Field wv(gb.size());
  for (std::size_t i = 0; i < gb.size(); ++i) wv[i] = gb[i] + 4.0 * model.Wbx()[i] * model.Wbx()[i];
  return half_energy(grid, f, ft, gb) + half_energy(grid, g, gt, wv);
}

EnergyHierarchy energy_hierarchy(const Model& model, const ZvJets& j) {
  const auto& grid = model.grid();
  EnergyHierarchy h;
  h.E = energy_E(grid, j.z[0], j.z[1]);
  Field a(j.z[0].size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = j.z[0][i] * j.z[0][i] + j.v[0][i] * j.v[0][i];
  h.A_cal = 0.5 * integrate(grid, a).value;

  const double e0 = energy_pair(model, j.z[0], j.z[1], j.v[0], j.v[1]);
  const double et = energy_pair(model, j.z[1], j.z[2], j.v[1], j.v[2]);
  const double ett = energy_pair(model, j.z[2], j.z[3], j.v[2], j.v[3]);
  const double ex = energy_pair(model, d1(grid, j.z[0]), d1(grid, j.z[1]), d1(grid, j.v[0]), d1(grid, j.v[1]));
  const double exx = energy_pair(model, d2(grid, j.z[0]), d2(grid, j.z[1]), d2(grid, j.v[0]), d2(grid, j.v[1]));
  h.E1 = et + e0;
  h.calE1 = ex + e0;
  h.E2 = h.E1 + ett;
  h.calE2 = h.calE1 + exx;
  return h;
}

namespace {

struct ChiDerivatives {
  Field W, Wt, Wx, qt, qx;
};

ChiDerivatives chi(const Model& model, const FieldState& s) {
  const auto& grid = model.grid();
  ChiDerivatives c;
  const Field dWx = d1(grid, s.dW);
  c.qx = d1(grid, s.dq);
  c.qt = s.dqt;
  c.Wt = s.dWt;
  c.W.resize(dWx.size());
  c.Wx.resize(dWx.size());
  for (std::size_t i = 0; i < dWx.size(); ++i) {
    c.W[i] = model.Wb()[i] + s.dW[i];
    c.Wx[i] = model.Wbx()[i] + dWx[i];
  }
  return c;
}

}  // namespace

double functional_S(const Model& model, const FieldState& s) {
  const auto& grid = model.grid();
  const auto c = chi(model, s);
  const double R0 = model.background().R0;
  const double damp = std::exp(-2.0 * s.t);
  Field f(c.W.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = grid.x(static_cast<int>(i));
    const double e4 = std::exp(-4.0 * c.W[i]);
    const double nt = 4.0 * c.Wt[i] * c.Wt[i] + e4 * c.qt[i] * c.qt[i];
    const double nx = 4.0 * c.Wx[i] * c.Wx[i] + e4 * c.qx[i] * c.qx[i];
    double Rs = R0 * std::cosh(2.0 * x);
    if (!model.r_perturbation().empty()) Rs += model.r_perturbation().value(s.t, x) * damp;
    f[i] = 0.5 * (nt + nx) * Rs;
  }
  return integrate(grid, f).value;
}

NullQuantities null_quantities(const Model& model, const FieldState& s) {
  const auto c = chi(model, s);
  NullQuantities nq{Field(c.W.size()), Field(c.W.size())};
  for (std::size_t i = 0; i < c.W.size(); ++i) {
    const double e4 = std::exp(-4.0 * c.W[i]);
    const double wp = c.Wt[i] + c.Wx[i], wm = c.Wt[i] - c.Wx[i];
    const double qp = c.qt[i] + c.qx[i], qm = c.qt[i] - c.qx[i];
    nq.A[i] = 4.0 * wp * wp + e4 * qp * qp;
    nq.B[i] = 4.0 * wm * wm + e4 * qm * qm;
  }
  return nq;
}

EnergyReport make_report(const Model& model, const FieldState& s) {
  const auto& grid = model.grid();
  EnergyReport r;
  r.t = s.t;
  r.m = m_norms(model, s.t);
  r.Mtilde = mtilde_norms(grid, s, 1);
  r.Mtilde_p2 = mtilde_norms(grid, s, 2);
  const auto h = energy_hierarchy(model, model.zv_jets(s));
  r.E = h.E;
  r.A_cal = h.A_cal;
  r.E1 = h.E1;
  r.calE1 = h.calE1;
  r.E2 = h.E2;
  r.calE2 = h.calE2;
  r.S = functional_S(model, s);
  const auto nq = null_quantities(model, s);
  r.sup_null_A = sup_abs(nq.A);
  r.sup_null_B = sup_abs(nq.B);
  r.sup_dW = sup_abs(s.dW);
  r.sup_dq = sup_abs(s.dq);
  const auto cr = residuals(model, s);
  r.res_momentum = cr.res_momentum;
  r.res_hamiltonian = cr.res_hamiltonian;
  r.curl_residual = cr.curl_residual;
  r.sup_da = s.lapse ? sup_abs(s.lapse->da) : 0.0;
  return r;
}

}  // namespace cuspwave
