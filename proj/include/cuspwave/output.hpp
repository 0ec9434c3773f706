#pragma once

// Bit-stable text output. Numbers use "%.17g"; lines end in '\n'. Files are
// written to a sibling temporary and renamed into place.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cuspwave/energies.hpp"
#include "cuspwave/run.hpp"

namespace cuspwave {

std::string format_double(double v);

std::string reports_csv(const std::vector<EnergyReport>& reports);

/// Long format: t, x, dW, dWt, dq, dqt, W, q, u, s per grid point and snapshot.
std::string snapshots_csv(const Model& model, const std::vector<Snapshot>& snapshots);

void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace cuspwave
