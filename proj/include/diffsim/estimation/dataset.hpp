#pragma once

#include <string>
#include <vector>

#include "diffsim/error.hpp"

namespace diffsim {

// One recorded rollout: q/qd rows per step plus the controls that were
// applied to reach the *next* step. Row 0 is the initial state.
struct RecordedTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> q;
  std::vector<std::vector<double>> qd;
  std::vector<std::vector<double>> tau;

  int steps() const { return static_cast<int>(times.size()); }
};

struct TrajectoryDataset {
  std::vector<RecordedTrajectory> trajectories;
  double dt = 0.0;

  void validate() const {
    if (trajectories.empty())
      throw ArgumentError("dataset: no trajectories");
    for (const auto& t : trajectories) {
      if (t.times.size() < 2)
        throw ArgumentError("dataset: trajectory with fewer than 2 rows");
      for (std::size_t i = 1; i < t.times.size(); ++i)
        if (std::abs(t.times[i] - t.times[i - 1] - dt) > 1e-9)
          throw ArgumentError("dataset: non-uniform dt");
    }
  }
};

// CSV schema: header `t,q0..q{nq-1},qd0..qd{n-1},tau0..tau{n-1}`, one row per
// step, full decimal precision. Byte-stable for identical inputs.
void save_trajectory_csv(const RecordedTrajectory& trajectory,
                         const std::string& path);
RecordedTrajectory load_trajectory_csv(const std::string& path);

// Loads `traj_000.csv ... traj_{k-1}.csv` from a directory.
TrajectoryDataset load_dataset_dir(const std::string& dir);

}  // namespace diffsim
