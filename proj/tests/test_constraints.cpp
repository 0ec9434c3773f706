#include <catch_amalgamated.hpp>

#include <cmath>

#include "cuspwave/constraints.hpp"
#include "cuspwave/energies.hpp"
#include "cuspwave/errors.hpp"

using namespace cuspwave;
using Catch::Matchers::WithinAbs;

namespace {

Grid grid_of(double L, double dx, int order) {
  return Grid(GridSpec{L, GridSpec::nx_for_dx(L, dx), 0.25, 1.0, 1}, order);
}

PerturbationSpec small_nonpolarized() {
  return PerturbationSpec{{{BumpTarget::W, 0.02, 0.0, 1.5},
                           {BumpTarget::Wt, 0.01, 0.1, 1.5},
                           {BumpTarget::q, 0.02, -0.1, 1.5},
                           {BumpTarget::qt, 0.01, 0.0, 1.5}}};
}

FieldState run_to(const Model& m, FieldState s, double t_end) {
  const int n = static_cast<int>(std::lround(t_end / (0.25 * m.grid().dx())));
  const double dt = t_end / n;
  for (int k = 0; k < n; ++k) s = m.evolve_a(s, dt);
  return s;
}

}  // namespace

TEST_CASE("constraint solve on the background") {
  for (auto p : {BackgroundParams(1.0, 1.0), BackgroundParams(2.0, 0.5, 0.3, -1.0, 0.7)}) {
    const Model m(grid_of(20.0, 0.05, 4), p, {});
    auto s = m.initial_state();
    for (double t : {0.0, 3.0}) {
      s.t = t;
      const auto g = solve_a_gradient(m, s);
      double eat = 0.0, eax = 0.0, efd = 0.0;
      for (int i = 0; i < m.grid().size(); ++i) {
        const double x = m.grid().x(i);
        const auto k = static_cast<std::size_t>(i);
        eat = std::max(eat, std::abs(g.at[k] - p.beta()));
        eax = std::max(eax, std::abs(g.ax[k] + p.alpha() * std::tanh(2 * x)));
        // finite-difference oracle on the closed-form lapse
        const double h = 1e-5;
        const double fd = (eval_background(t, x + h, p).a - eval_background(t, x - h, p).a) / (2 * h);
        efd = std::max(efd, std::abs(g.ax[k] - fd));
      }
      CHECK(eat <= 1e-10);
      CHECK(eax <= 1e-10);
      CHECK(efd <= 1e-8);
    }
  }
}

TEST_CASE("background residuals vanish") {
  const Model m(grid_of(20.0, 0.05, 4), BackgroundParams(1.0, 1.0), {});
  auto s = m.initial_state();
  s.lapse = initial_lapse(m, s, LapseMode::Constrained);
  CHECK(sup_abs(s.lapse->da) <= 1e-12);
  CHECK(sup_abs(s.lapse->dat) <= 1e-12);
  const auto r = residuals(m, s);
  CHECK(r.res_momentum <= 1e-10);
  CHECK(r.res_hamiltonian <= 1e-10);
  CHECK(r.curl_residual <= 1e-10);
  const auto fixed = run_to(m, s, 1.0);
  CHECK(sup_abs(fixed.lapse->da) <= 1e-12);
}

TEST_CASE("line integration reproduces the closed-form lapse") {
  const BackgroundParams p(1.0, 1.0, 0.0, 0.0, 0.4);
  const Grid g = grid_of(8.0, 0.01, 4);
  const double T = 2.0;
  std::vector<double> ts, at_anchor;
  for (int j = 0; j <= 200; ++j) {
    ts.push_back(T * j / 200);
    at_anchor.push_back(p.beta());
  }
  const Field ax = g.sample([&](double x) { return -p.alpha() * std::tanh(2 * x); });
  const Field a = integrate_a(g, ts, at_anchor, ax, eval_background(0.0, g.x(0), p).a);
  double e = 0.0;
  for (int i = 0; i < g.size(); ++i) e = std::max(e, std::abs(a[static_cast<std::size_t>(i)] - eval_background(T, g.x(i), p).a));
  CHECK(e <= 1e-8);

  std::vector<Field> hist(ts.size(), Field(static_cast<std::size_t>(g.size()), p.beta()));
  CHECK(path_defect(g, ts, hist, ax, ax) <= 1e-10);
}

TEST_CASE("constraint-initialized lapse stays consistent and converges at second order") {
  std::vector<ConstraintReport> reps;
  std::vector<double> consistency;
  for (double dx : {0.01, 0.005}) {
    const Model m(grid_of(8.0, dx, 2), BackgroundParams(1.0, 1.0),
                  PerturbationSpec{{{BumpTarget::W, 0.02, 0.0, 1.5}, {BumpTarget::q, 0.01, 0.0, 1.5}}});
    auto s = m.initial_state();
    s.lapse = initial_lapse(m, s, LapseMode::Constrained);
    s = run_to(m, s, 2.0);
    reps.push_back(residuals(m, s));
    const auto g = solve_a_gradient(m, s);
    const Field dax = d1(m.grid(), s.lapse->da);
    double d = 0.0;
    for (int i = 2; i < m.grid().size() - 2; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const auto b = eval_background(s.t, m.grid().x(i), m.background());
      d = std::max({d, std::abs(g.at[k] - b.at - s.lapse->dat[k]), std::abs(g.ax[k] - b.ax - dax[k])});
    }
    consistency.push_back(d);
  }
  for (const auto& r : reps) {
    CHECK(std::isfinite(r.res_momentum));
    CHECK(r.res_momentum >= 0.0);
  }
  const double rm = reps[0].res_momentum / reps[1].res_momentum;
  const double rh = reps[0].res_hamiltonian / reps[1].res_hamiltonian;
  CHECK(rm > 3.0);
  CHECK(rm < 5.5);
  CHECK(rh > 3.0);
  CHECK(rh < 5.5);
  const double c0 = reps[0].res_hamiltonian / (0.01 * 0.01), c1 = reps[1].res_hamiltonian / (0.005 * 0.005);
  CHECK(c1 / c0 > 0.7);
  CHECK(c1 / c0 < 1.4);
  CHECK(consistency[0] / consistency[1] > 3.0);
  CHECK(reps[0].curl_residual / reps[1].curl_residual > 2.5);
}

TEST_CASE("constraint-violating lapse data is flagged") {
  const Model m(grid_of(8.0, 0.01, 2), BackgroundParams(1.0, 1.0), small_nonpolarized());
  auto good = m.initial_state();
  auto bad = good;
  good.lapse = initial_lapse(m, good, LapseMode::Constrained);
  bad.lapse = initial_lapse(m, bad, LapseMode::Free);
  CHECK(sup_abs(bad.lapse->da) == 0.0);
  const auto rg = residuals(m, good), rb = residuals(m, bad);
  CHECK(rb.curl_residual > 1e-3);
  CHECK(rb.curl_residual > 10 * rg.curl_residual);
  CHECK(rb.res_hamiltonian > 10 * rg.res_hamiltonian);
}

TEST_CASE("lapse gradient deviation stays bounded") {
  const Model m(grid_of(16.0, 0.04, 4), BackgroundParams(1.0, 1.0),
                PerturbationSpec{{{BumpTarget::W, 1e-3, 0.0, 1.5}, {BumpTarget::Wt, 1e-3, 0.5, 1.0}}});
  auto s = m.initial_state();
  s.lapse = initial_lapse(m, s, LapseMode::Constrained);
  auto deviation = [&m](const FieldState& st) {
    const auto g = solve_a_gradient(m, st);
    double d = 0.0;
    for (int i = 0; i < m.grid().size(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      const auto b = eval_background(st.t, m.grid().x(i), m.background());
      d = std::max({d, std::abs(g.at[k] - b.at), std::abs(g.ax[k] - b.ax)});
    }
    return d;
  };
  const double d0 = deviation(s);
  const double m0 = Mtilde_k(m.grid(), s, 2);
  const int n = static_cast<int>(std::lround(10.0 / (0.25 * 0.04)));
  for (int k = 0; k < n; ++k) s = m.step(s, 10.0 / n);
  // M̃₂ decays while the gradient deviation is carried along the outgoing rays
  CHECK(Mtilde_k(m.grid(), s, 2) < 1e-3 * m0);
  CHECK(deviation(s) <= 2.0 * d0);
}
