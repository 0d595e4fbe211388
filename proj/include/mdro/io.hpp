#pragma once

#include "mdro/markov.hpp"

#include <json.hpp>

#include <string>

namespace mdro {

using nlohmann::json;

// CSV: one row per line, comma-separated, d columns.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);

// One integer state per line, 1-based externally; the first line is xi_0.
Trajectory read_trajectory(const std::string& path, int d);
void write_trajectory(const std::string& path, const Trajectory& traj);

// Structured record {"d": d, "entries": [[...], ...]} (row-major).
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

// Writes to <path>.tmp and renames, so failures never leave partial files.
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace mdro
