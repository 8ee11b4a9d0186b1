#pragma once

#include <span>
#include <string>
#include <vector>

#include "diffsim/estimation/dataset.hpp"
#include "diffsim/sim/world.hpp"

namespace diffsim {

enum class ParameterKind { kAnalytical, kNeural };

// A named, bounded slice of the optimization vector. Analytical blocks name
// model or penalty parameters one by one; a neural block names the blueprint
// target it owns and spans that network's full flat parameter vector.
struct ParameterBlock {
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<double> lower;
  std::vector<double> upper;
  ParameterKind kind = ParameterKind::kAnalytical;

  std::size_t size() const { return values.size(); }

  void validate() const {
    if (names.empty() && kind == ParameterKind::kAnalytical)
      throw ArgumentError("parameter block: no names");
    if (lower.size() != values.size() || upper.size() != values.size())
      throw ArgumentError("parameter block: bounds size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!(lower[i] <= values[i] && values[i] <= upper[i]))
        throw ArgumentError("parameter block: value outside bounds at index " +
                            std::to_string(i));
  }

  static ParameterBlock analytical(std::vector<std::string> names,
                                   std::vector<double> values,
                                   std::vector<double> lower,
                                   std::vector<double> upper) {
    ParameterBlock b;
    b.names = std::move(names);
    b.values = std::move(values);
    b.lower = std::move(lower);
    b.upper = std::move(upper);
    b.validate();
    return b;
  }

  // spans the full parameter vector of the blueprint targeting `target`
  static ParameterBlock neural(const std::string& target,
                               std::vector<double> values, double bound) {
    ParameterBlock b;
    b.kind = ParameterKind::kNeural;
    b.names = {target};
    b.lower.assign(values.size(), -bound);
    b.upper.assign(values.size(), bound);
    b.values = std::move(values);
    b.validate();
    return b;
  }
};

// Installs block values (of any scalar type) into a setup. Analytical names
// hit the model unless they carry the penalty_ prefix; the neural kind
// replaces the flat parameters of the named blueprint.
template <class S>
void apply_parameters(SimSetup<S>& setup, const ParameterBlock& block,
                      std::span<const S> values) {
  if (values.size() != block.size())
    throw ArgumentError("apply_parameters: value count mismatch");
  if (block.kind == ParameterKind::kNeural) {
    if (block.names.size() != 1)
      throw ArgumentError("neural parameter block must name one blueprint");
    for (auto& bp : setup.augmentations.all()) {
      if (bp.target != block.names[0]) continue;
      if (values.size() != bp.params.flat.size())
        throw ArgumentError("neural parameter block size != network size");
      bp.params.flat.assign(values.begin(), values.end());
      return;
    }
    throw ArgumentError("no blueprint targets '" + block.names[0] + "'");
  }
  for (std::size_t i = 0; i < block.names.size(); ++i) {
    const auto& name = block.names[i];
    if (name == "penalty_stiffness")
      setup.penalty.stiffness = values[i];
    else if (name == "penalty_damping")
      setup.penalty.damping = values[i];
    else if (name == "penalty_smoothing")
      setup.penalty.smoothing_velocity = values[i];
    else
      set_named_parameter(setup.model, name, values[i]);
  }
}

// Mean squared error of a resimulation against the recorded trajectories:
// every (q, qd) entry of every step weighs equally. Divergence surfaces as
// RolloutError carrying the step index.
template <class S>
S rollout_loss(const SimSetup<S>& setup, const TrajectoryDataset& data,
               const StepOptions& opt, int max_steps_per_trajectory = -1) {
  data.validate();
  S total(0.0);
  long count = 0;
  for (const auto& traj : data.trajectories) {
    JointState<S> state;
    state.time = traj.times[0];
    for (double v : traj.q[0]) state.q.push_back(S(v));
    for (double v : traj.qd[0]) state.qd.push_back(S(v));
    if (static_cast<int>(state.q.size()) != setup.model.nq() ||
        static_cast<int>(state.qd.size()) != setup.model.dof())
      throw ArgumentError("rollout_loss: dataset dimensions do not match model");

    int steps = traj.steps() - 1;
    if (max_steps_per_trajectory >= 0)
      steps = std::min(steps, max_steps_per_trajectory);

    auto control = [&](int t) {
      std::vector<S> tau;
      tau.reserve(traj.tau[static_cast<std::size_t>(t)].size());
      for (double v : traj.tau[static_cast<std::size_t>(t)]) tau.push_back(S(v));
      return tau;
    };
    auto accumulate = [&](int t, const JointState<S>& s) {
      const auto& q_ref = traj.q[static_cast<std::size_t>(t + 1)];
      const auto& qd_ref = traj.qd[static_cast<std::size_t>(t + 1)];
      for (std::size_t i = 0; i < q_ref.size(); ++i) {
        const S d = s.q[i] - S(q_ref[i]);
        total += d * d;
        ++count;
      }
      for (std::size_t i = 0; i < qd_ref.size(); ++i) {
        const S d = s.qd[i] - S(qd_ref[i]);
        total += d * d;
        ++count;
      }
    };
    rollout(setup, state, steps, opt, control, accumulate);
  }
  return total * S(1.0 / static_cast<double>(count));
}

struct SpinnTerms {
  double kappa = 0.0;
  double lambda = 0.0;
};

// Rollout objective evaluable under all three scalar realizations: rebuilds
// the setup in the requested type, installs the candidate parameters,
// simulates, and (for neural blocks) adds the sparse-group penalty.
class RolloutObjective {
 public:
  RolloutObjective(SimSetup<double> base, TrajectoryDataset data,
                   StepOptions opt, ParameterBlock block,
                   SpinnTerms spinn = {}, int max_steps = -1)
      : base_(std::move(base)),
        data_(std::move(data)),
        opt_(opt),
        block_(std::move(block)),
        spinn_(spinn),
        max_steps_(max_steps) {}

  template <class Sp>
  auto operator()(Sp x) const {
    using S = std::remove_cvref_t<decltype(x[0])>;
    SimSetup<S> setup = convert_setup<S>(base_);
    apply_parameters(setup, block_, std::span<const S>(x.data(), x.size()));
    S loss = rollout_loss(setup, data_, opt_, max_steps_);
    if (block_.kind == ParameterKind::kNeural &&
        (spinn_.kappa > 0.0 || spinn_.lambda > 0.0)) {
      const auto* bp = setup.augmentations.find(block_.names[0]);
      loss += spinn_penalty(bp->spec, bp->params.flat, spinn_.kappa,
                            spinn_.lambda);
    }
    return loss;
  }

  const ParameterBlock& block() const { return block_; }

 private:
  SimSetup<double> base_;
  TrajectoryDataset data_;
  StepOptions opt_;
  ParameterBlock block_;
  SpinnTerms spinn_;
  int max_steps_;
};

}  // namespace diffsim
