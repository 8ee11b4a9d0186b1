#include "diffsim/estimation/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace diffsim {
namespace {

// %.17g keeps doubles bit-exact through the round trip and is byte-stable
// across runs.
void append_value(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += ',';
  line += buf;
}

}  // namespace

void save_trajectory_csv(const RecordedTrajectory& trajectory,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("dataset: cannot write file: " + path);
  const std::size_t nq = trajectory.q.empty() ? 0 : trajectory.q[0].size();
  const std::size_t nd = trajectory.qd.empty() ? 0 : trajectory.qd[0].size();
  const std::size_t nt = trajectory.tau.empty() ? 0 : trajectory.tau[0].size();

  std::string header = "t";
  for (std::size_t i = 0; i < nq; ++i) header += ",q" + std::to_string(i);
  for (std::size_t i = 0; i < nd; ++i) header += ",qd" + std::to_string(i);
  for (std::size_t i = 0; i < nt; ++i) header += ",tau" + std::to_string(i);
  out << header << '\n';

  for (int row = 0; row < trajectory.steps(); ++row) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g",
                  trajectory.times[static_cast<std::size_t>(row)]);
    std::string line = buf;
    for (double v : trajectory.q[static_cast<std::size_t>(row)])
      append_value(line, v);
    for (double v : trajectory.qd[static_cast<std::size_t>(row)])
      append_value(line, v);
    for (double v : trajectory.tau[static_cast<std::size_t>(row)])
      append_value(line, v);
    out << line << '\n';
  }
}

RecordedTrajectory load_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("dataset: cannot open file: " + path);
  std::string header;
  if (!std::getline(in, header))
    throw ParseError("dataset: empty file: " + path);

  std::size_t nq = 0, nd = 0, nt = 0;
  {
    std::istringstream hs(header);
    std::string col;
    bool first = true;
    while (std::getline(hs, col, ',')) {
      if (first) {
        if (col != "t") throw ParseError("dataset: bad header in " + path);
        first = false;
      } else if (col.rfind("qd", 0) == 0) {
        ++nd;
      } else if (col.rfind("q", 0) == 0) {
        ++nq;
      } else if (col.rfind("tau", 0) == 0) {
        ++nt;
      } else {
        throw ParseError("dataset: unknown column '" + col + "' in " + path);
      }
    }
  }

  RecordedTrajectory t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != 1 + nq + nd + nt)
      throw ParseError("dataset: ragged row in " + path);
    t.times.push_back(row[0]);
    t.q.emplace_back(row.begin() + 1, row.begin() + 1 + nq);
    t.qd.emplace_back(row.begin() + 1 + nq, row.begin() + 1 + nq + nd);
    t.tau.emplace_back(row.begin() + 1 + nq + nd, row.end());
  }
  if (t.times.empty()) throw ParseError("dataset: no rows in " + path);
  return t;
}

TrajectoryDataset load_dataset_dir(const std::string& dir) {
  TrajectoryDataset data;
  for (int k = 0;; ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "traj_%03d.csv", k);
    const auto path = std::filesystem::path(dir) / name;
    if (!std::filesystem::exists(path)) break;
    data.trajectories.push_back(load_trajectory_csv(path.string()));
  }
  if (data.trajectories.empty())
    throw ParseError("dataset: no traj_*.csv files in " + dir);
  const auto& t0 = data.trajectories[0];
  data.dt = t0.times.size() > 1 ? t0.times[1] - t0.times[0] : 0.0;
  data.validate();
  return data;
}

}  // namespace diffsim
