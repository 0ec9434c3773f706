#include <catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "cuspwave/diagnostics.hpp"
#include "cuspwave/errors.hpp"

using namespace cuspwave;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RunConfig small_config(int order, bool perturbed, LapseMode lapse = LapseMode::None) {
  RunConfig c;
  c.background = BackgroundParams(1.0, 1.0);
  c.grid.L = 6.0;
  c.grid.t_final = 1.0;
  c.grid.output_stride = 1000000;
  c.scheme.stencil_order = order;
  c.set_dx(0.04);
  c.lapse = lapse;
  if (perturbed) c.perturbation.bumps = {{BumpTarget::W, 1e-3, 0.0, 3.0}, {BumpTarget::q, 1e-3, 0.2, 2.8}};
  return c;
}

std::vector<double> times(double dt, double t_end) {
  std::vector<double> t;
  for (int i = 0; i * dt <= t_end + 1e-12; ++i) t.push_back(i * dt);
  return t;
}

}  // namespace

TEST_CASE("decay fit of its own model") {
  const auto t = times(0.1, 10.0);
  std::vector<double> M;
  for (double s : t) M.push_back(std::exp(-s) * (s + 1.0));
  const double scale = 0.8;
  const auto fit = decay_fit(t, M, scale);
  CHECK_THAT(fit.lambda, WithinAbs(-1.0, 0.01));
  CHECK_THAT(fit.C_fit, WithinRel(1.0 / scale, 0.01));
  CHECK(fit.t_min == 4.0);
  CHECK(fit.t_max == 10.0);
  CHECK(fit.residual < 1e-10);

  // scale equivariance
  std::vector<double> M3;
  for (double v : M) M3.push_back(3.0 * v);
  const auto f3 = decay_fit(t, M3, scale);
  CHECK_THAT(f3.lambda, WithinAbs(fit.lambda, 1e-12));
  CHECK_THAT(f3.C_fit, WithinRel(3.0 * fit.C_fit, 1e-12));
}

TEST_CASE("decay fit negative control and floor") {
  const auto t = times(0.1, 10.0);
  const std::vector<double> flat(t.size(), 2e-3);
  const auto fit = decay_fit(t, flat, 1e-3);
  // only the log(t+1) factor is left
  CHECK(std::abs(fit.lambda) < 0.15);
  CHECK(fit.lambda > -0.9);

  const std::vector<double> zero(t.size(), 0.0);
  const auto fz = decay_fit(t, zero, 1.0);
  CHECK(std::isfinite(fz.lambda));
  CHECK(fz.C_fit == 0.0);
}

TEST_CASE("decay fit window checks") {
  const auto t = times(0.1, 7.0);
  const std::vector<double> M(t.size(), 1.0);
  CHECK_THROWS_MATCHES(decay_fit(t, M, 1.0), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.kind() == ErrorKind::InsufficientSpan;
                       }));
  CHECK_NOTHROW(decay_fit(t, M, 1.0, 2.0));
  CHECK_THROWS_AS(decay_fit(t, M, 0.0, 2.0), Error);
  CHECK_THROWS_AS(decay_fit(t, std::vector<double>(3, 1.0), 1.0), Error);
}

TEST_CASE("fit_constant") {
  const std::vector<double> zero(5, 0.0), rhs{1, 2, 3, 4, 5};
  CHECK(fit_constant(zero, rhs) == 0.0);
  const std::vector<double> lhs{1, 1, 6, 2, 1};
  CHECK(fit_constant(lhs, rhs) == 2.0);
  // enlarging the sample set never decreases C
  double prev = 0.0;
  for (std::size_t n = 1; n <= lhs.size(); ++n) {
    const double c = fit_constant(std::span(lhs).first(n), std::span(rhs).first(n));
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(std::isinf(fit_constant(std::vector<double>{1.0}, std::vector<double>{0.0})));
}

TEST_CASE("fit_constant on a background run is zero") {
  RunConfig c = small_config(4, false);
  c.grid.output_stride = 10;
  const auto res = run(c);
  REQUIRE(res.status == RunStatus::Completed);
  REQUIRE(res.reports.size() > 2);
  const double C = fit_constant(
      res.reports, [](const EnergyReport& r, const EnergyReport&) { return std::sqrt(r.E); },
      [](const EnergyReport&, const EnergyReport& r0) { return std::sqrt(r0.E) + 1.0; });
  CHECK(C == 0.0);
}

TEST_CASE("convergence study of the background is exact") {
  const auto st = convergence_study(small_config(4, false), {0.04, 0.02, 0.01}, 3);
  REQUIRE(st.dx.size() == 3);
  for (const auto& q : st.quantities) {
    INFO(q.name);
    CHECK(q.exact);
    CHECK_FALSE(q.non_monotone);
    CHECK(std::isnan(q.order));
  }
  CHECK_THROWS_AS(st.get("nope"), Error);
  CHECK_THROWS_AS(convergence_study(small_config(4, false), {0.04, 0.02}, 1), Error);
}

TEST_CASE("self-convergence orders") {
  const auto s2 = convergence_study(small_config(2, true), {0.02, 0.01, 0.005}, 3);
  CHECK_FALSE(s2.get("dW").exact);
  CHECK(s2.get("dW").order >= 1.8);
  CHECK(s2.get("dW").order <= 2.2);
  CHECK(s2.get("Mtilde3").order >= 1.8);
  CHECK(s2.get("Mtilde3").order <= 2.2);
  const auto s4 = convergence_study(small_config(4, true), {0.02, 0.01, 0.005}, 3);
  CHECK(s4.get("dW").order >= 3.5);
  CHECK(s4.get("dW").order <= 4.2);
  CHECK(s4.get("Mtilde3").order >= 3.5);
  CHECK(s4.get("Mtilde3").order <= 4.2);
  CHECK_FALSE(s4.get("dW").non_monotone);
}

TEST_CASE("isometry drift is second order in dx") {
  RunConfig c = small_config(2, false);
  c.isometry = IsometrySpec{1.0, 0.3, 0.2, 1.06};
  c.grid.t_final = 2.0;
  const double d1 = isometry_drift(c);
  c.set_dx(0.02);
  const double d2 = isometry_drift(c);
  CHECK(d1 > 0.0);
  CHECK(d1 / d2 > 3.0);
  CHECK(d1 / d2 < 5.5);
}

TEST_CASE("background verification") {
  const auto chk = verify_background(7, 5, 1000);
  CHECK(chk.pass);
  CHECK(chk.max_residual <= 1e-10);
}

TEST_CASE("parallel execution") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);

  std::vector<RunConfig> cfgs;
  for (double a : {1e-3, 2e-3, 3e-3}) {
    RunConfig c = small_config(4, true);
    c.perturbation.bumps[0].amplitude = a;
    c.grid.output_stride = 25;
    cfgs.push_back(c);
  }
  const auto par = run_many(cfgs, 3);
  const auto seq = run_many(cfgs, 1);
  REQUIRE(par.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(par[i].final_state.dW == seq[i].final_state.dW);
    CHECK(par[i].reports.back().values() == seq[i].reports.back().values());
  }
  CHECK(par[0].final_state.dW != par[1].final_state.dW);
}
