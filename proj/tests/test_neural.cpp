#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "diffsim/neural/blueprint.hpp"
#include "diffsim/scalar/gradient.hpp"

using namespace diffsim;

TEST_CASE("count_parameters") {
  MlpSpec spec;
  spec.input_names = {"a", "b", "c", "d"};
  spec.hidden_layers = {16, 16};
  spec.output_dim = 2;
  CHECK(count_parameters(spec) == 386);

  MlpSpec tiny;
  tiny.input_names = {"x"};
  tiny.output_dim = 1;
  CHECK(count_parameters(tiny) == 2);

  MlpSpec bad;  // zero inputs rejected
  bad.output_dim = 1;
  CHECK_THROWS_AS((void)count_parameters(bad), ArgumentError);

  MlpSpec dup;
  dup.input_names = {"x", "x"};
  CHECK_THROWS_AS(dup.validate(), ArgumentError);
}

TEST_CASE("mlp_forward basics") {
  SUBCASE("all-zero parameters give all-zero outputs") {
    MlpSpec spec;
    spec.input_names = {"a", "b", "c"};
    spec.hidden_layers = {8};
    spec.output_dim = 2;
    auto params = NetworkParameters<double>::zeros(spec);
    auto out = mlp_forward(spec, params, {1.0, -2.0, 3.0});
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);
  }
  SUBCASE("single linear layer with identity weights is the identity") {
    MlpSpec spec;
    spec.input_names = {"a", "b"};
    spec.output_dim = 2;
    auto params = NetworkParameters<double>::zeros(spec);
    params.flat[0] = 1.0;  // W row-major 2x2
    params.flat[3] = 1.0;
    auto out = mlp_forward(spec, params, {0.7, -1.3});
    CHECK(out[0] == doctest::Approx(0.7));
    CHECK(out[1] == doctest::Approx(-1.3));
  }
  SUBCASE("ELU(-1) matches its closed form") {
    CHECK(elu(-1.0) == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-12));
    // and flows through a network: 1 input, 1 hidden unit with w=1, b=0
    MlpSpec spec;
    spec.input_names = {"x"};
    spec.hidden_layers = {1};
    spec.output_dim = 1;
    spec.activation = Activation::kElu;
    auto params = NetworkParameters<double>::zeros(spec);
    params.flat[0] = 1.0;  // W0
    params.flat[2] = 1.0;  // W1
    auto out = mlp_forward(spec, params, {-1.0});
    CHECK(out[0] == doctest::Approx(std::exp(-1.0) - 1.0));
  }
  SUBCASE("shape mismatch raises") {
    MlpSpec spec;
    spec.input_names = {"a", "b"};
    auto params = NetworkParameters<double>::zeros(spec);
    CHECK_THROWS_AS((void)mlp_forward(spec, params, {1.0}), ArgumentError);
  }
  SUBCASE("deterministic across runs") {
    MlpSpec spec;
    spec.input_names = {"a", "b", "c"};
    spec.hidden_layers = {8, 8};
    spec.output_dim = 2;
    auto params = init_parameters(spec, 7);
    auto a = mlp_forward(spec, params, {0.1, 0.2, 0.3});
    auto b = mlp_forward(spec, params, {0.1, 0.2, 0.3});
    CHECK(a[0] == b[0]);
    CHECK(a[1] == b[1]);
  }
}

TEST_CASE("initialization is bounded by 1/sqrt(fan_in) and seeded") {
  MlpSpec spec;
  spec.input_names = {"a", "b", "c", "d"};
  spec.hidden_layers = {16};
  spec.output_dim = 1;
  auto p1 = init_parameters(spec, 42);
  auto p2 = init_parameters(spec, 42);
  auto p3 = init_parameters(spec, 43);
  CHECK(p1.flat == p2.flat);
  CHECK(p1.flat != p3.flat);
  // W0 entries bounded by 1/2, W1 by 1/4; biases zero
  for (int i = 0; i < 64; ++i) CHECK(std::abs(p1.flat[static_cast<std::size_t>(i)]) <= 0.5);
  for (int i = 64; i < 80; ++i) CHECK(p1.flat[static_cast<std::size_t>(i)] == 0.0);
  for (int i = 80; i < 96; ++i) CHECK(std::abs(p1.flat[static_cast<std::size_t>(i)]) <= 0.25);
  CHECK(p1.flat[96] == 0.0);
}

TEST_CASE("resolve_neural_scalar") {
  VariableRegistry<double> reg;
  reg.set("a", 1.5);

  SUBCASE("zero parameters vanish exactly") {
    NeuralBlueprint<double> b;
    b.target = "e";
    b.spec.input_names = {"a"};
    b.params = NetworkParameters<double>::zeros(b.spec);
    CHECK(resolve_neural_scalar(reg, b, 3.2) == 3.2);
  }
  SUBCASE("linear network adds w*x") {
    NeuralBlueprint<double> b;
    b.target = "e";
    b.spec.input_names = {"a"};
    b.params = NetworkParameters<double>::zeros(b.spec);
    b.params.flat[0] = 2.0;
    CHECK(resolve_neural_scalar(reg, b, 0.0) == doctest::Approx(3.0));
  }
  SUBCASE("unresolved input names the missing variable") {
    NeuralBlueprint<double> b;
    b.target = "e";
    b.spec.input_names = {"a", "missing_var"};
    b.params = NetworkParameters<double>::zeros(b.spec);
    CHECK_THROWS_AS((void)resolve_neural_scalar(reg, b, 0.0), ConfigError);
    try {
      (void)resolve_neural_scalar(reg, b, 0.0);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("missing_var") != std::string::npos);
    }
  }
}

TEST_CASE("augmented variable wiring mirrors the two-input/three-input split") {
  // e = phi(a, b) + NN(a, c, d): varying b moves only the analytical part
  auto phi = [](double a, double b) { return a * b + 0.5 * b; };
  VariableRegistry<double> reg;
  reg.set("a", 0.8);
  reg.set("c", -0.4);
  reg.set("d", 1.1);
  NeuralBlueprint<double> bp;
  bp.target = "e";
  bp.spec.input_names = {"a", "c", "d"};
  bp.spec.hidden_layers = {8};
  bp.params.flat = init_parameters(bp.spec, 11).flat;

  const double e1 = resolve_neural_scalar(reg, bp, phi(0.8, 1.0));
  const double e2 = resolve_neural_scalar(reg, bp, phi(0.8, 2.0));
  CHECK(e2 - e1 == doctest::Approx(phi(0.8, 2.0) - phi(0.8, 1.0)).epsilon(1e-12));
  // while varying c moves only the network part
  reg.set("c", 0.9);
  const double e3 = resolve_neural_scalar(reg, bp, phi(0.8, 1.0));
  CHECK(e3 != doctest::Approx(e1));
}

TEST_CASE("duplicate targets are rejected") {
  NeuralBlueprint<double> a, b;
  a.target = b.target = "tau";
  a.spec.input_names = {"x"};
  a.spec.output_dim = 1;
  a.params = NetworkParameters<double>::zeros(a.spec);
  b.spec = a.spec;
  b.params = a.params;
  AugmentationSet<double> set;
  set.add(a);
  CHECK_THROWS_AS(set.add(b), ConfigError);
}

TEST_CASE("spinn loss") {
  MlpSpec spec;
  spec.input_names = {"x"};
  spec.output_dim = 1;

  SUBCASE("kappa = lambda = 0 reduces to the data term") {
    NetworkParameters<double> p{{2.0, 0.3}};
    CHECK(spinn_loss(1.25, spec, p, 0.0, 0.0) == doctest::Approx(1.25));
  }
  SUBCASE("zero parameters contribute nothing") {
    auto p = NetworkParameters<double>::zeros(spec);
    CHECK(spinn_loss(0.5, spec, p, 0.7, 0.3) == doctest::Approx(0.5));
  }
  SUBCASE("single first-layer weight of 2 at kappa = 0.5 costs 1.0") {
    NetworkParameters<double> p{{2.0, 0.0}};
    CHECK(spinn_loss(0.0, spec, p, 0.5, 0.0) == doctest::Approx(1.0));
  }
  SUBCASE("biases are excluded from both penalties") {
    NetworkParameters<double> p{{0.0, 123.0}};  // bias only
    CHECK(spinn_loss(0.0, spec, p, 0.5, 0.5) == doctest::Approx(0.0));
  }
  SUBCASE("upper layers pay squared L2, not L1") {
    MlpSpec deep;
    deep.input_names = {"x"};
    deep.hidden_layers = {1};
    deep.output_dim = 1;
    // layout: W0(1), b0(1), W1(1), b1(1)
    NetworkParameters<double> p{{3.0, 0.0, 2.0, 0.0}};
    CHECK(spinn_loss(0.0, deep, p, 1.0, 1.0) == doctest::Approx(3.0 + 4.0));
  }
  SUBCASE("negative coefficients are rejected") {
    auto p = NetworkParameters<double>::zeros(spec);
    CHECK_THROWS_AS((void)spinn_loss(0.0, spec, p, -1.0, 0.0), ArgumentError);
  }
}

TEST_CASE("spinn gradient matches finite differences away from the L1 kink") {
  MlpSpec spec;
  spec.input_names = {"a", "b"};
  spec.hidden_layers = {4};
  spec.output_dim = 1;
  auto init = init_parameters(spec, 3);
  // keep weights off the kink
  for (auto& w : init.flat)
    if (std::abs(w) < 1e-2) w = w < 0.0 ? w - 0.05 : w + 0.05;

  auto objective = [&spec](auto x) {
    using S = std::remove_cvref_t<decltype(x[0])>;
    NetworkParameters<S> p;
    p.flat.assign(x.begin(), x.end());
    std::vector<S> in{S(0.4), S(-1.2)};
    auto out = mlp_forward(spec, p, in);
    const S mse = out[0] * out[0];
    return spinn_loss(mse, spec, p, 1e-2, 1e-3);
  };
  auto g_fd = evaluate_gradient(objective, init.flat,
                                {GradMode::kFiniteDifference, 1e-6});
  auto g_tape = evaluate_gradient(objective, init.flat, {GradMode::kReverseTape});
  auto g_dual = evaluate_gradient(objective, init.flat, {GradMode::kForwardDual});
  for (std::size_t i = 0; i < init.flat.size(); ++i) {
    const double scale = std::max(1e-6, std::abs(g_fd[i]));
    CHECK(std::abs(g_tape[i] - g_fd[i]) / scale < 1e-4);
    CHECK(std::abs(g_dual[i] - g_fd[i]) / scale < 1e-4);
  }
}

TEST_CASE("input column masses sum first-layer weight magnitudes per input") {
  MlpSpec spec;
  spec.input_names = {"p", "q"};
  spec.hidden_layers = {2};
  spec.output_dim = 1;
  // W0 = [[1, -2], [3, 4]] row-major
  NetworkParameters<double> params{{1.0, -2.0, 3.0, 4.0, 0.0, 0.0, 9.0, 9.0, 0.0}};
  auto mass = input_column_mass(spec, params);
  CHECK(mass[0] == doctest::Approx(4.0));
  CHECK(mass[1] == doctest::Approx(6.0));
}

TEST_CASE("blueprint json round trip is lossless") {
  NeuralBlueprint<double> b;
  b.target = "tau";
  b.spec.input_names = {"q[0]", "q[1]", "qd[0]", "qd[1]"};
  b.spec.hidden_layers = {16, 16};
  b.spec.output_dim = 2;
  b.spec.activation = Activation::kElu;
  b.params.flat = init_parameters(b.spec, 2024).flat;
  b.params.flat[0] = 0.1 + 0.2;  // a value without a short decimal form

  const auto text = blueprint_to_json(b);
  const auto back = blueprint_from_json(text);
  CHECK(back.target == b.target);
  CHECK(back.spec.input_names == b.spec.input_names);
  CHECK(back.spec.hidden_layers == b.spec.hidden_layers);
  CHECK(back.spec.output_dim == b.spec.output_dim);
  CHECK(back.spec.activation == b.spec.activation);
  REQUIRE(back.params.flat.size() == b.params.flat.size());
  for (std::size_t i = 0; i < b.params.flat.size(); ++i)
    CHECK(back.params.flat[i] == b.params.flat[i]);  // bit-exact

  const auto dir = std::filesystem::temp_directory_path() / "diffsim_bp_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "bp.json").string();
  save_blueprint(b, path);
  const auto loaded = load_blueprint(path);
  CHECK(loaded.params.flat == b.params.flat);
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS((void)blueprint_from_json("{not json"), ParseError);
  CHECK_THROWS_AS((void)blueprint_from_json("{\"target_name\": \"x\"}"),
                  ParseError);
}
