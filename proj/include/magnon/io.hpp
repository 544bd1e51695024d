#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "magnon/drive.hpp"
#include "magnon/readout.hpp"
#include "magnon/scenario.hpp"

namespace magnon {

/// Parses a JSON scenario config. Unknown keys at any level are rejected.
/// A relative calibration_file resolves against `base_dir`; output.dir is
/// left relative to the working directory.
ScenarioConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

HardwarePreset load_hardware_preset(const std::filesystem::path& path);
ReadoutCalibration load_calibration(const std::filesystem::path& path);

/// Directory holding the bundled hardware and calibration files.
std::filesystem::path data_dir();

/// Nine significant digits, locale independent.
std::string format_number(double value);

std::string trajectory_csv(const Trajectory& traj);
/// Rows are sites, columns are time points.
std::string heatmap_text(const Trajectory& traj);
std::string shots_csv(const Trajectory& traj, const ShotRecord& record, const CorrectedProbabilities& corrected);
std::string summary_json(const ScenarioSummary& summary);
std::string sweep_csv(const std::string& axis, const std::vector<SweepRow>& rows);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace magnon
