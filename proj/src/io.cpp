#include "mdro/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mdro {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
  std::istringstream in(slurp(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidInput("non-numeric CSV cell in " + path + ": '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidInput("ragged CSV rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("empty CSV matrix: " + path);
  Matrix m(rows.size(), rows.front().size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

Trajectory read_trajectory(const std::string& path, int d) {
  std::istringstream in(slurp(path));
  std::vector<int> states;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    int s;
    try {
      s = std::stoi(line);
    } catch (const std::exception&) {
      throw InvalidInput("non-integer state in " + path + ": '" + line + "'");
    }
    if (s < 1 || s > d) throw InvalidInput("state out of range [1," + std::to_string(d) + "]");
    states.push_back(s - 1);
  }
  if (states.size() < 2) throw InvalidInput("trajectory needs xi_0 plus at least one step");
  Trajectory traj;
  traj.d = d;
  traj.initial_state = states.front();
  traj.states.assign(states.begin() + 1, states.end());
  return traj;
}

void write_trajectory(const std::string& path, const Trajectory& traj) {
  std::ostringstream out;
  out << traj.initial_state + 1 << '\n';
  for (int s : traj.states) out << s + 1 << '\n';
  atomic_write(path, out.str());
}

json matrix_to_json(const Matrix& m) {
  json entries = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    entries.push_back(std::move(row));
  }
  return json{{"d", m.rows()}, {"entries", std::move(entries)}};
}

Matrix matrix_from_json(const json& j) {
  if (!j.contains("entries")) throw InvalidInput("matrix record missing 'entries'");
  const auto& entries = j.at("entries");
  const int rows = static_cast<int>(entries.size());
  if (rows == 0) throw InvalidInput("empty matrix record");
  const int cols = static_cast<int>(entries.at(0).size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(entries.at(i).size()) != cols)
      throw InvalidInput("ragged matrix record");
    for (int k = 0; k < cols; ++k) m(i, k) = entries.at(i).at(k).get<double>();
  }
  if (j.contains("d") && j.at("d").get<int>() != rows)
    throw InvalidInput("matrix record 'd' disagrees with entries");
  return m;
}

void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw InvalidInput("cannot open for writing: " + tmp);
    out << contents;
    if (!out) throw InvalidInput("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InvalidInput("rename failed for " + path + ": " + ec.message());
}

}  // namespace mdro
