#pragma once

// Post-processing of run results: decay fits, inequality constants,
// self-convergence orders, and parallel execution of independent runs.

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cuspwave/config.hpp"
#include "cuspwave/run.hpp"

namespace cuspwave {

struct DecayFit {
  double lambda = 0.0;    // least-squares slope of log M - log(t+1)
  double C_fit = 0.0;     // max M e^t / ((t+1) initial_scale) over all samples
  double t_min = 0.0, t_max = 0.0;
  double residual = 0.0;  // RMS misfit of the line
};

inline constexpr double kNormFloor = 1e-14;

/// Fits over [window_start, min(window_end, last t)]. `initial_scale` is the
/// normalization M̃_k(0) + m_k(0). Throws Error(InsufficientSpan) if the
/// window is shorter than 4 time units.
DecayFit decay_fit(std::span<const double> t, std::span<const double> M, double initial_scale,
                   double window_start = 4.0, double window_end = std::numeric_limits<double>::infinity());

/// Smallest C with lhs[i] ≤ C rhs[i] for all i (0 when lhs ≡ 0).
double fit_constant(std::span<const double> lhs, std::span<const double> rhs);

using ReportTerm = std::function<double(const EnergyReport& now, const EnergyReport& initial)>;
/// fit_constant over a report series; both sides see the sample and the t = 0 report.
double fit_constant(const std::vector<EnergyReport>& reports, const ReportTerm& lhs, const ReportTerm& rhs);

struct ConvergenceQuantity {
  std::string name;
  std::vector<double> errors;  // successive differences, or the values for residual-type quantities
  double order = std::numeric_limits<double>::quiet_NaN();  // from the finest pair
  bool exact = false;          // all errors at round-off; order undefined
  bool non_monotone = false;   // errors fail to decrease with resolution
};

struct ConvergenceStudy {
  std::vector<double> dx;
  std::vector<ConvergenceQuantity> quantities;
  const ConvergenceQuantity& get(const std::string& name) const;
};

/// Runs cfg at each spacing in dx_list (coarse to fine, ≥ 3 entries, each
/// coarse node also a fine node) and reports Richardson orders for the final
/// ΔW field at common nodes, M̃_3, and the constraint residuals.
ConvergenceStudy convergence_study(const RunConfig& cfg, const std::vector<double>& dx_list, int threads = 1,
                                   double roundoff = 1e-12);

/// Evolves the isometry image of the background (bumps dropped) and returns
/// the sup over steps of max|ΔW(t) - ΔW(0)|, |Δq(t) - Δq(0)|.
double isometry_drift(const RunConfig& cfg);

struct BackgroundCheck {
  double max_residual = 0.0;       // field equations and constraints
  double max_fd_mismatch = 0.0;    // relative, analytic partials vs central differences
  double max_roundtrip = 0.0;      // coords_prime round trip
  bool pass = false;
};

/// Analytic identities of the background on random parameter sets and points
/// (t in [0, 5], x in [-5, 5]).
BackgroundCheck verify_background(unsigned long long seed, int n_sets = 5, int n_points = 1000);

/// Runs independent configurations on up to `threads` workers. Results are in
/// input order; the first exception thrown by any run is rethrown.
std::vector<RunResult> run_many(const std::vector<RunConfig>& configs, int threads);

/// Generic parallel map used by sweeps.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace cuspwave
