#include "cuspwave/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "cuspwave/errors.hpp"

namespace cuspwave {

DecayFit decay_fit(std::span<const double> t, std::span<const double> M, double initial_scale, double window_start,
                   double window_end) {
  if (t.size() != M.size() || t.empty()) throw Error(ErrorKind::InvalidArgument, "decay_fit needs matching series");
  if (!(initial_scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "decay_fit needs a positive initial scale");
  DecayFit fit;
  fit.t_min = window_start;
  fit.t_max = std::min(window_end, t.back());
  if (fit.t_max - fit.t_min < 4.0)
    throw Error(ErrorKind::InsufficientSpan, "fit window [" + std::to_string(fit.t_min) + ", " +
                                                 std::to_string(fit.t_max) + "] shorter than 4");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < fit.t_min - 1e-12 || t[i] > fit.t_max + 1e-12) continue;
    const double y = std::log(std::max(M[i], kNormFloor)) - std::log1p(t[i]);
    sx += t[i];
    sy += y;
    sxx += t[i] * t[i];
    sxy += t[i] * y;
    ++n;
  }
  if (n < 2) throw Error(ErrorKind::InsufficientSpan, "fewer than two samples in the fit window");
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  fit.lambda = (dn * sxy - sx * sy) / denom;
  const double icpt = (sy - fit.lambda * sx) / dn;
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < fit.t_min - 1e-12 || t[i] > fit.t_max + 1e-12) continue;
    const double y = std::log(std::max(M[i], kNormFloor)) - std::log1p(t[i]);
    const double r = y - (icpt + fit.lambda * t[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / dn);
  for (std::size_t i = 0; i < t.size(); ++i)
    fit.C_fit = std::max(fit.C_fit, M[i] * std::exp(t[i]) / ((t[i] + 1.0) * initial_scale));
  return fit;
}

double fit_constant(std::span<const double> lhs, std::span<const double> rhs) {
  if (lhs.size() != rhs.size()) throw Error(ErrorKind::InvalidArgument, "fit_constant needs matching series");
  double c = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (lhs[i] <= 0.0) continue;
    c = std::max(c, rhs[i] > 0.0 ? lhs[i] / rhs[i] : std::numeric_limits<double>::infinity());
  }
  return c;
}

double fit_constant(const std::vector<EnergyReport>& reports, const ReportTerm& lhs, const ReportTerm& rhs) {
  if (reports.empty()) return 0.0;
  std::vector<double> l, r;
  for (const auto& rep : reports) {
    l.push_back(lhs(rep, reports.front()));
    r.push_back(rhs(rep, reports.front()));
  }
  return fit_constant(l, r);
}

const ConvergenceQuantity& ConvergenceStudy::get(const std::string& name) const {
  for (const auto& q : quantities)
    if (q.name == name) return q;
  throw Error(ErrorKind::InvalidArgument, "no convergence quantity '" + name + "'");
}

namespace {

ConvergenceQuantity assess(std::string name, std::vector<double> errors, double ratio, double scale, double roundoff) {
  ConvergenceQuantity q;
  q.name = std::move(name);
  q.errors = std::move(errors);
  const double emax = *std::max_element(q.errors.begin(), q.errors.end());
  q.exact = emax <= roundoff * std::max(1.0, scale);
  for (std::size_t i = 1; i < q.errors.size(); ++i)
    if (!(q.errors[i] < q.errors[i - 1])) q.non_monotone = true;
  if (q.exact) {
    q.non_monotone = false;
    return q;
  }
  const std::size_t n = q.errors.size();
  q.order = std::log(q.errors[n - 2] / q.errors[n - 1]) / std::log(ratio);
  return q;
}

}  // namespace

ConvergenceStudy convergence_study(const RunConfig& cfg, const std::vector<double>& dx_list, int threads,
                                   double roundoff) {
  if (dx_list.size() < 3) throw Error(ErrorKind::InvalidArgument, "convergence study needs at least 3 resolutions");
  std::vector<RunConfig> cfgs;
  for (double dx : dx_list) {
    RunConfig c = cfg;
    c.set_dx(dx);
    c.grid.output_stride = std::numeric_limits<int>::max();
    c.output.snapshot_stride = 0;
    cfgs.push_back(c);
  }
  const auto results = run_many(cfgs, threads);
  for (const auto& r : results)
    if (r.status != RunStatus::Completed) throw Error(ErrorKind::BlowUp, "convergence run failed: " + r.message);

  ConvergenceStudy st;
  for (const auto& r : results) st.dx.push_back(r.dx);
  const double ratio = st.dx[st.dx.size() - 2] / st.dx.back();

  // Final ΔW at the coarse nodes.
  const Model coarse = make_model(cfgs.front());
  const auto& cg = coarse.grid();
  auto node_values = [&](std::size_t run) {
    const Model m = make_model(cfgs[run]);
    const auto& g = m.grid();
    Field v(static_cast<std::size_t>(cg.size()));
    for (int i = 0; i < cg.size(); ++i) {
      const double x = cg.x(i);
      const long j = std::lround((x + g.L()) / g.dx());
      if (j < 0 || j >= g.size() || std::abs(g.x(static_cast<int>(j)) - x) > 1e-9 * g.dx())
        throw Error(ErrorKind::InvalidArgument, "coarse nodes are not fine nodes; use nested spacings");
      v[static_cast<std::size_t>(i)] = results[run].final_state.dW[static_cast<std::size_t>(j)];
    }
    return v;
  };
  std::vector<Field> fields;
  for (std::size_t r = 0; r < results.size(); ++r) fields.push_back(node_values(r));
  std::vector<double> field_err, m3_err;
  double field_scale = 0.0, m3_scale = 0.0;
  for (std::size_t r = 0; r + 1 < results.size(); ++r) {
    double e = 0.0;
    for (std::size_t i = 0; i < fields[r].size(); ++i) e = std::max(e, std::abs(fields[r][i] - fields[r + 1][i]));
    field_err.push_back(e);
    const double a = results[r].reports.back().Mtilde[3], b = results[r + 1].reports.back().Mtilde[3];
    m3_err.push_back(std::abs(a - b));
  }
  for (std::size_t r = 0; r < results.size(); ++r) {
    field_scale = std::max(field_scale, sup_abs(fields[r]));
    m3_scale = std::max(m3_scale, results[r].reports.back().Mtilde[3]);
  }
  st.quantities.push_back(assess("dW", field_err, ratio, field_scale, roundoff));
  st.quantities.push_back(assess("Mtilde3", m3_err, ratio, m3_scale, roundoff));
  for (const char* name : {"res_hamiltonian", "res_momentum", "curl_residual"}) {
    std::vector<double> v;
    for (const auto& r : results) v.push_back(r.reports.back().get(name));
    st.quantities.push_back(assess(name, v, ratio, 1.0, roundoff));
  }
  return st;
}

double isometry_drift(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.perturbation.bumps.clear();
  c.lapse = LapseMode::None;
  const Model model = make_model(c);
  const FieldState s0 = make_initial_state(model, c);
  FieldState s = s0;
  const int steps = model.grid().steps();
  double drift = 0.0;
  for (int k = 1; k <= steps; ++k) {
    s = model.step(s, model.grid().dt());
    for (std::size_t i = 0; i < s.dW.size(); ++i)
      drift = std::max({drift, std::abs(s.dW[i] - s0.dW[i]), std::abs(s.dq[i] - s0.dq[i])});
  }
  return drift;
}

BackgroundCheck verify_background(unsigned long long seed, int n_sets, int n_points) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uR0(0.2, 5.0), uW0(0.2, 2.0), uoff(-2.0, 2.0), ut(0.0, 5.0), ux(-5.0, 5.0);
  std::bernoulli_distribution sign(0.5);
  BackgroundCheck chk;
  constexpr double h = 1e-6;
  for (int k = 0; k < n_sets; ++k) {
    const BackgroundParams p(uR0(rng), (sign(rng) ? 1.0 : -1.0) * uW0(rng), uoff(rng), uoff(rng), uoff(rng));
    for (int j = 0; j < n_points; ++j) {
      const double t = ut(rng), x = ux(rng);
      chk.max_residual = std::max(chk.max_residual, background_residuals(t, x, p).max_abs());
      const auto b = eval_background(t, x, p);
      const auto bp = eval_background(t + h, x, p), bm = eval_background(t - h, x, p);
      const auto xp = eval_background(t, x + h, p), xm = eval_background(t, x - h, p);
      auto rel = [](double fd, double exact, double scale) { return std::abs(fd - exact) / std::max(1.0, scale); };
      const double mism = std::max({rel((bp.R - bm.R) / (2 * h), b.Rt, std::abs(b.R)),
                                    rel((xp.R - xm.R) / (2 * h), b.Rx, std::abs(b.R)),
                                    rel((xp.W - xm.W) / (2 * h), b.Wx, 1.0), rel((bp.a - bm.a) / (2 * h), b.at, 1.0),
                                    rel((xp.a - xm.a) / (2 * h), b.ax, 1.0)});
      chk.max_fd_mismatch = std::max(chk.max_fd_mismatch, mism);
      const auto [tp, xq] = coords_prime(t, x, p.W0);
      const auto [t2, x2] = coords_prime_inverse(tp, xq, p.W0);
      chk.max_roundtrip = std::max({chk.max_roundtrip, std::abs(t2 - t), std::abs(x2 - x)});
    }
  }
  chk.pass = chk.max_residual <= 1e-10 && chk.max_fd_mismatch <= 1e-6 && chk.max_roundtrip <= 1e-12;
  return chk;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<RunResult> run_many(const std::vector<RunConfig>& configs, int threads) {
  std::vector<RunResult> out(configs.size());
  parallel_for(configs.size(), threads, [&](std::size_t i) { out[i] = run(configs[i]); });
  return out;
}

}  // namespace cuspwave
