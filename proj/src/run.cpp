#include "cuspwave/run.hpp"

#include <cmath>

#include "cuspwave/constraints.hpp"
#include "cuspwave/errors.hpp"

namespace cuspwave {

namespace {

constexpr double kSpongeTolerance = 1e-13;

double sponge_sup(const FieldState& s) {
  const std::size_t n = s.dW.size();
  double m = 0.0;
  for (const Field* f : {&s.dW, &s.dWt, &s.dq, &s.dqt})
    for (std::size_t i : {std::size_t{0}, std::size_t{1}, n - 2, n - 1}) m = std::max(m, std::abs((*f)[i]));
  return m;
}

}  // namespace

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::BlowUp: return "blow-up";
    case RunStatus::NonPositiveR: return "non-positive-R";
    case RunStatus::SupportViolation: return "support-violation";
  }
  return "unknown";
}

Model make_model(const RunConfig& cfg) {
  cfg.validate();
  GridSpec gs = cfg.grid;
  gs.cfl = cfg.scheme.cfl;
  return Model(Grid(gs, cfg.scheme.stencil_order), cfg.background, cfg.perturbation);
}

void check_gates(const Model& model, const RunConfig& cfg) {
  const double m0 = m_k(model, 0.0, 0);
  const double limit = 2.0 * cfg.background.R0 / 3.0;
  if (!(m0 < limit))
    throw Error(ErrorKind::GateRejected, "Theorem-1 gate: m0(0) = " + std::to_string(m0) + " must be below 2*R0/3 = " +
                                             std::to_string(limit));
  if (cfg.isometry || cfg.perturbation.empty()) return;
  const auto& g = model.grid();
  const double need = cfg.perturbation.support_radius() + cfg.grid.t_final + 2.0 * g.dx();
  if (g.L() < need)
    throw Error(ErrorKind::GateRejected, "support-safety gate: L = " + std::to_string(g.L()) + " must be at least " +
                                             std::to_string(need));
}

FieldState make_initial_state(const Model& model, const RunConfig& cfg) {
  FieldState s = model.initial_state();
  if (cfg.isometry) {
    const auto& m = *cfg.isometry;
    const Isometry iso(m.a, m.b, m.c, m.d);
    const auto n = s.dW.size();
    WqFields f{Field(n), Field(n), s.dWt, s.dqt};
    for (std::size_t i = 0; i < n; ++i) {
      f.W[i] = model.Wb()[i] + s.dW[i];
      f.q[i] = cfg.background.q0 + s.dq[i];
    }
    const auto img = apply_isometry(iso, f);
    for (std::size_t i = 0; i < n; ++i) {
      s.dW[i] = img.W[i] - model.Wb()[i];
      s.dq[i] = img.q[i] - cfg.background.q0;
    }
    s.dWt = img.Wt;
    s.dqt = img.qt;
  }
  if (cfg.lapse != LapseMode::None) s.lapse = initial_lapse(model, s, cfg.lapse);
  return s;
}

RunResult run(const RunConfig& cfg) {
  const Model model = make_model(cfg);
  check_gates(model, cfg);
  const auto& grid = model.grid();
  RunResult res;
  res.dx = grid.dx();
  res.dt = grid.dt();

  FieldState s = make_initial_state(model, cfg);
  const int steps = grid.steps();
  const int stride = cfg.grid.output_stride;
  const int snap = cfg.output.snapshot_stride;
  const bool compact = !cfg.isometry;

  auto record = [&](int step) {
    if (step % stride == 0 || step == steps) res.reports.push_back(make_report(model, s));
    if (snap > 0 && (step % snap == 0 || step == steps)) res.snapshots.push_back({s});
  };

  try {
    record(0);
    for (int k = 1; k <= steps; ++k) {
      s = model.step(s, res.dt);
      s.t = (k == steps) ? cfg.grid.t_final : k * res.dt;
      if (compact && sponge_sup(s) > kSpongeTolerance) {
        res.status = RunStatus::SupportViolation;
        res.message = "perturbation reached the boundary layer at t=" + std::to_string(s.t);
        break;
      }
      record(k);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::BlowUp) res.status = RunStatus::BlowUp;
    else if (e.kind() == ErrorKind::NonPositiveR) res.status = RunStatus::NonPositiveR;
    else throw;
    res.message = e.what();
  }
  res.final_state = s;
  return res;
}

}  // namespace cuspwave
