#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "diffsim/neural/blueprint.hpp"

namespace diffsim {
namespace {

using nlohmann::json;

Activation activation_from_string(const std::string& s) {
  if (s == "elu") return Activation::kElu;
  if (s == "tanh") return Activation::kTanh;
  if (s == "identity") return Activation::kIdentity;
  throw ParseError("blueprint: unknown activation '" + s + "'");
}

const char* activation_to_string(Activation a) {
  switch (a) {
    case Activation::kElu: return "elu";
    case Activation::kTanh: return "tanh";
    case Activation::kIdentity: return "identity";
  }
  return "elu";
}

}  // namespace

std::string blueprint_to_json(const NeuralBlueprint<double>& blueprint) {
  json j;
  j["target_name"] = blueprint.target;
  j["input_names"] = blueprint.spec.input_names;
  j["hidden_layers"] = blueprint.spec.hidden_layers;
  j["output_dim"] = blueprint.spec.output_dim;
  j["activation"] = activation_to_string(blueprint.spec.activation);
  j["parameters"] = blueprint.params.flat;
  return j.dump(2);
}

NeuralBlueprint<double> blueprint_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("blueprint: invalid json: ") + e.what());
  }
  NeuralBlueprint<double> b;
  try {
    b.target = j.at("target_name").get<std::string>();
    b.spec.input_names = j.at("input_names").get<std::vector<std::string>>();
    b.spec.hidden_layers = j.at("hidden_layers").get<std::vector<int>>();
    b.spec.output_dim = j.value("output_dim", 1);
    b.spec.activation =
        activation_from_string(j.value("activation", std::string("elu")));
    b.params.flat = j.at("parameters").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("blueprint: missing or mistyped field: ") +
                     e.what());
  }
  b.spec.validate();
  if (static_cast<int>(b.params.flat.size()) != count_parameters(b.spec))
    throw ParseError("blueprint: parameter count does not match architecture");
  return b;
}

void save_blueprint(const NeuralBlueprint<double>& blueprint,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("blueprint: cannot write file: " + path);
  out << blueprint_to_json(blueprint) << '\n';
}

NeuralBlueprint<double> load_blueprint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("blueprint: cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return blueprint_from_json(ss.str());
}

}  // namespace diffsim
