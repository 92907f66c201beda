#pragma once

#include "qualidetect/solver.hpp"

#include <string>
#include <vector>

namespace qualidetect {

/// A header plus rows of cells, written comma-separated with LF line endings.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// %.17g, which round-trips every double.
std::string format_real(double v);

std::string to_csv(const Trajectory& traj);
std::string to_csv(const Table& table);

/// Throws IOError naming the path on failure.
void write_text(const std::string& path, const std::string& text);
void emit_csv(const Trajectory& traj, const std::string& path);
void emit_csv(const Table& table, const std::string& path);

/// Parses a trajectory CSV (first column t, all cells numeric).
Trajectory parse_trajectory_csv(const std::string& text);
Trajectory read_csv(const std::string& path);

}  // namespace qualidetect
