#pragma once

#include <random>
#include <string>
#include <vector>

#include "diffsim/error.hpp"
#include "diffsim/scalar/scalar_ops.hpp"

namespace diffsim {

enum class Activation { kElu, kTanh, kIdentity };

// Architecture of an augmentation network: named inputs, hidden widths, and
// the activation applied after each hidden layer (the output stays linear).
struct MlpSpec {
  std::vector<std::string> input_names;
  std::vector<int> hidden_layers;
  int output_dim = 1;
  Activation activation = Activation::kElu;

  int input_dim() const { return static_cast<int>(input_names.size()); }

  std::vector<int> layer_dims() const {
    std::vector<int> dims{input_dim()};
    dims.insert(dims.end(), hidden_layers.begin(), hidden_layers.end());
    dims.push_back(output_dim);
    return dims;
  }

  void validate() const {
    if (input_names.empty())
      throw ArgumentError("mlp: at least one input is required");
    for (int w : hidden_layers)
      if (w < 1) throw ArgumentError("mlp: hidden widths must be >= 1");
    if (output_dim < 1) throw ArgumentError("mlp: output_dim must be >= 1");
    for (std::size_t i = 0; i < input_names.size(); ++i)
      for (std::size_t j = i + 1; j < input_names.size(); ++j)
        if (input_names[i] == input_names[j])
          throw ArgumentError("mlp: duplicate input name '" + input_names[i] +
                              "'");
  }
};

// Total trainable parameter count: sum over layers of in*out + out.
inline int count_parameters(const MlpSpec& spec) {
  spec.validate();
  const auto dims = spec.layer_dims();
  int total = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l)
    total += dims[l] * dims[l + 1] + dims[l + 1];
  return total;
}

// Flat parameter vector, layer-major: W0 (row-major out x in), b0, W1, b1...
// Flatten/unflatten is the identity, so round trips are exact by
// construction.
template <class S>
struct NetworkParameters {
  std::vector<S> flat;

  static NetworkParameters zeros(const MlpSpec& spec) {
    return {std::vector<S>(static_cast<std::size_t>(count_parameters(spec)),
                           S(0.0))};
  }
};

// Seeded uniform init in [-r, r] with r = 1/sqrt(fan_in); biases start at 0.
inline NetworkParameters<double> init_parameters(const MlpSpec& spec,
                                                 std::uint64_t seed) {
  auto params = NetworkParameters<double>::zeros(spec);
  std::mt19937_64 rng(seed);
  const auto dims = spec.layer_dims();
  std::size_t at = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double r = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    std::uniform_real_distribution<double> dist(-r, r);
    for (int i = 0; i < dims[l] * dims[l + 1]; ++i) params.flat[at++] = dist(rng);
    at += static_cast<std::size_t>(dims[l + 1]);  // biases stay zero
  }
  return params;
}

template <class S>
S apply_activation(Activation a, const S& x) {
  using std::tanh;
  switch (a) {
    case Activation::kElu: return elu(x);
    case Activation::kTanh: return tanh(x);
    case Activation::kIdentity: return x;
  }
  throw ArgumentError("unknown activation");
}

// Dense forward pass. Differentiable w.r.t. both inputs and parameters
// through the scalar abstraction.
template <class S>
std::vector<S> mlp_forward(const MlpSpec& spec,
                           const NetworkParameters<S>& params,
                           const std::vector<S>& inputs) {
  spec.validate();
  if (static_cast<int>(inputs.size()) != spec.input_dim())
    throw ArgumentError("mlp_forward: input size mismatch");
  if (static_cast<int>(params.flat.size()) != count_parameters(spec))
    throw ArgumentError("mlp_forward: parameter size mismatch");

  const auto dims = spec.layer_dims();
  std::vector<S> x = inputs;
  std::size_t at = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], out = dims[l + 1];
    std::vector<S> y(static_cast<std::size_t>(out), S(0.0));
    for (int i = 0; i < out; ++i) {
      S acc = S(0.0);
      for (int j = 0; j < in; ++j)
        acc += params.flat[at + static_cast<std::size_t>(i * in + j)] *
               x[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = acc;
    }
    at += static_cast<std::size_t>(in * out);
    for (int i = 0; i < out; ++i)
      y[static_cast<std::size_t>(i)] += params.flat[at + static_cast<std::size_t>(i)];
    at += static_cast<std::size_t>(out);
    if (l + 2 < dims.size())
      for (auto& v : y) v = apply_activation(spec.activation, v);
    x = std::move(y);
  }
  return x;
}

// Sparse-group-lasso penalty: L1 on the first-layer weights (input
// sparsification) plus squared L2 on every upper-layer weight matrix.
// Biases are exempt from both terms.
template <class S>
S spinn_penalty(const MlpSpec& spec, const std::vector<S>& flat, double kappa,
                double lambda) {
  if (kappa < 0.0 || lambda < 0.0)
    throw ArgumentError("spinn: kappa and lambda must be >= 0");
  const auto dims = spec.layer_dims();
  S l1(0.0), l2(0.0);
  std::size_t at = 0;
  using std::abs;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int nw = dims[l] * dims[l + 1];
    for (int i = 0; i < nw; ++i) {
      const S& w = flat[at + static_cast<std::size_t>(i)];
      if (l == 0)
        l1 += abs(w);
      else
        l2 += w * w;
    }
    at += static_cast<std::size_t>(nw + dims[l + 1]);
  }
  return S(kappa) * l1 + S(lambda) * l2;
}

// Full Eq.-style cost: rollout MSE plus the sparse-group penalty.
template <class S>
S spinn_loss(const S& rollout_mse, const MlpSpec& spec,
             const NetworkParameters<S>& params, double kappa, double lambda) {
  return rollout_mse + spinn_penalty(spec, params.flat, kappa, lambda);
}

// L1 mass of each first-layer column, keyed by input position. The discovery
// report derives input activity from these.
template <class S>
std::vector<double> input_column_mass(const MlpSpec& spec,
                                      const NetworkParameters<S>& params) {
  const auto dims = spec.layer_dims();
  std::vector<double> mass(static_cast<std::size_t>(dims[0]), 0.0);
  for (int i = 0; i < dims[1]; ++i)
    for (int j = 0; j < dims[0]; ++j)
      mass[static_cast<std::size_t>(j)] += std::abs(
          primal(params.flat[static_cast<std::size_t>(i * dims[0] + j)]));
  return mass;
}

}  // namespace diffsim
