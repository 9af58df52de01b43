#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "npi/simcore.hpp"

namespace npi {

/// 17 significant digits, '%g' style; round-trips every finite double.
std::string format_double(double v);

/// Header "t,y,u,u_nom,z", one row per recorded sample, '\n' line ends.
std::string trajectory_csv(const Trajectory& traj);

/// Parses the CSV produced by trajectory_csv (columns t, y, u, u_nom, z).
Trajectory parse_trajectory_csv(std::string_view text);

/// Writes to a sibling temporary file and renames it over `path`.
/// Creates missing parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace npi
