#pragma once

// Run configuration in a flat sectioned key = value format:
//
//   [background]   R0 W0 W1 q0 a0
//   [grid]         L, nx or dx, t_final, output_stride
//   [scheme]       stencil_order (2|4), cfl
//   [perturbation] bump = <target> <amplitude> <center> <width> [smooth|cosine]   (repeatable)
//   [lapse]        mode = constrained|free|none
//   [isometry]     a b c d   (optional; evolves the image of the data under the Möbius map)
//   [output]       csv, verdict, snapshot_stride (0 = none)
//   [diagnostics]  k, window_start, c_max, lambda_max, residual_tol, drift_constant
//
// '#' starts a comment. Unknown sections or keys are errors.

#include <optional>
#include <string>

#include "cuspwave/background.hpp"
#include "cuspwave/evolve.hpp"
#include "cuspwave/grid.hpp"
#include "cuspwave/profile.hpp"

namespace cuspwave {

struct SchemeSpec {
  int stencil_order = 4;
  double cfl = 0.25;
};

struct OutputSpec {
  std::string csv = "run.csv";
  std::string verdict = "verdict.json";
  int snapshot_stride = 0;
};

struct DiagnosticsSpec {
  int k = 3;                  // which M̃_k the decay report fits
  double window_start = 4.0;  // fit window [window_start, t_final]
  double c_max = 20.0;        // verdict thresholds
  double lambda_max = -0.9;
  double residual_tol = 1e-6;    // constraint-report bound on every residual
  double drift_constant = 10.0;  // isometry-check bound drift ≤ C dx²
};

struct IsometrySpec {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
};

struct RunConfig {
  BackgroundParams background;
  GridSpec grid;
  SchemeSpec scheme;
  PerturbationSpec perturbation;
  LapseMode lapse = LapseMode::None;
  std::optional<IsometrySpec> isometry;
  OutputSpec output;
  DiagnosticsSpec diagnostics;

  /// Field-level invariants only; the run gates are checked by run().
  void validate() const;
  /// Replaces nx so that the spacing is (as close as possible to) dx.
  void set_dx(double dx);
};

/// Throws Error(Parse) with the offending line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

}  // namespace cuspwave
