#pragma once

// Orchestration of a single evolution: gates, initial data, stepping, reports.

#include <optional>
#include <string>
#include <vector>

#include "cuspwave/config.hpp"
#include "cuspwave/energies.hpp"
#include "cuspwave/evolve.hpp"

namespace cuspwave {

enum class RunStatus { Completed, BlowUp, NonPositiveR, SupportViolation };
const char* to_string(RunStatus s);

struct Snapshot {
  FieldState state;
};

struct RunResult {
  RunStatus status = RunStatus::Completed;
  std::string message;
  std::vector<EnergyReport> reports;
  std::vector<Snapshot> snapshots;
  FieldState final_state;
  double dx = 0.0;
  double dt = 0.0;
};

Model make_model(const RunConfig& cfg);

/// Pre-compute gates: m_0(0) < 2R0/3 and, for compact data, the support
/// margin L ≥ support_radius + t_final + 2 dx. Throws Error(GateRejected).
void check_gates(const Model& model, const RunConfig& cfg);

/// Initial state with lapse rows per cfg.lapse and, if configured, mapped by
/// the isometry (time derivatives pushed forward).
FieldState make_initial_state(const Model& model, const RunConfig& cfg);

/// Integrates to t_final. Gate failures throw; evolution failures are
/// reported through RunResult::status with the reports gathered so far.
RunResult run(const RunConfig& cfg);

}  // namespace cuspwave
