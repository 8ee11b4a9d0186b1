#pragma once

#include <map>
#include <string>
#include <vector>

#include "diffsim/neural/mlp.hpp"

namespace diffsim {

// Binding of a neural scalar: which named simulation variable is augmented,
// from which named inputs, with what network. The combination is additive,
// e = phi + NN(inputs), so zero parameters vanish exactly.
template <class S>
struct NeuralBlueprint {
  std::string target;
  MlpSpec spec;
  NetworkParameters<S> params;
};

template <class T, class S>
NeuralBlueprint<T> convert_blueprint(const NeuralBlueprint<S>& b) {
  NeuralBlueprint<T> out;
  out.target = b.target;
  out.spec = b.spec;
  out.params.flat.reserve(b.params.flat.size());
  for (const auto& v : b.params.flat) out.params.flat.push_back(T(primal(v)));
  return out;
}

// Step-scoped name -> value store. The engine writes variables as they are
// produced within a step; blueprints read them by name.
template <class S>
class VariableRegistry {
 public:
  void clear() { values_.clear(); }

  void set(const std::string& name, const S& value) { values_[name] = value; }

  bool has(const std::string& name) const { return values_.count(name) > 0; }

  const S& get(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end())
      throw ConfigError("neural input '" + name +
                        "' is not registered in this step");
    return it->second;
  }

  std::vector<S> gather(const std::vector<std::string>& names) const {
    std::vector<S> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(get(n));
    return out;
  }

 private:
  std::map<std::string, S> values_;
};

// Scalar attachment point: analytical value plus the network output.
template <class S>
S resolve_neural_scalar(const VariableRegistry<S>& registry,
                        const NeuralBlueprint<S>& blueprint,
                        const S& analytical) {
  if (blueprint.spec.output_dim != 1)
    throw ConfigError("blueprint '" + blueprint.target +
                      "' is not scalar-valued");
  const auto out = mlp_forward(blueprint.spec, blueprint.params,
                               registry.gather(blueprint.spec.input_names));
  return analytical + out[0];
}

// Vector attachment point (e.g. the full joint-torque vector).
template <class S>
std::vector<S> resolve_neural_vector(const VariableRegistry<S>& registry,
                                     const NeuralBlueprint<S>& blueprint,
                                     std::vector<S> analytical) {
  if (blueprint.spec.output_dim != static_cast<int>(analytical.size()))
    throw ConfigError("blueprint '" + blueprint.target +
                      "' output dim does not match the target dimension");
  const auto out = mlp_forward(blueprint.spec, blueprint.params,
                               registry.gather(blueprint.spec.input_names));
  for (std::size_t i = 0; i < analytical.size(); ++i) analytical[i] += out[i];
  return analytical;
}

// The set of blueprints active in one simulation. Each target may be
// registered at most once.
template <class S>
class AugmentationSet {
 public:
  AugmentationSet() = default;
  explicit AugmentationSet(std::vector<NeuralBlueprint<S>> blueprints) {
    for (auto& b : blueprints) add(std::move(b));
  }

  void add(NeuralBlueprint<S> blueprint) {
    blueprint.spec.validate();
    for (const auto& b : blueprints_)
      if (b.target == blueprint.target)
        throw ConfigError("duplicate neural target '" + blueprint.target + "'");
    blueprints_.push_back(std::move(blueprint));
  }

  const NeuralBlueprint<S>* find(const std::string& target) const {
    for (const auto& b : blueprints_)
      if (b.target == target) return &b;
    return nullptr;
  }

  bool empty() const { return blueprints_.empty(); }
  std::size_t size() const { return blueprints_.size(); }
  const std::vector<NeuralBlueprint<S>>& all() const { return blueprints_; }
  std::vector<NeuralBlueprint<S>>& all() { return blueprints_; }

 private:
  std::vector<NeuralBlueprint<S>> blueprints_;
};

// JSON (de)serialization; keys: target_name, input_names, hidden_layers,
// activation, parameters. Doubles survive round trips losslessly.
std::string blueprint_to_json(const NeuralBlueprint<double>& blueprint);
NeuralBlueprint<double> blueprint_from_json(const std::string& text);
void save_blueprint(const NeuralBlueprint<double>& blueprint,
                    const std::string& path);
NeuralBlueprint<double> load_blueprint(const std::string& path);

}  // namespace diffsim
