#pragma once

#include <stdexcept>
#include <string>

namespace diffsim {

// Objective or gradient evaluation produced a non-finite value.
// `coordinate` is the parameter index involved, or -1 when unknown.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(std::string what, int coordinate = -1)
      : std::runtime_error(std::move(what)), coordinate(coordinate) {}
  int coordinate;
};

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-physical model encountered during a dynamics pass (e.g. singular
// articulated inertia). Carries the offending joint index.
class DynamicsError : public std::runtime_error {
 public:
  DynamicsError(std::string what, int joint = -1)
      : std::runtime_error(std::move(what)), joint(joint) {}
  int joint;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(std::string what, int contact = -1)
      : std::runtime_error(std::move(what)), contact(contact) {}
  int contact;
};

class UnsupportedPairError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input describing a structure the engine does not model
// (kinematic loops, multiply-parented links).
class UnsupportedStructureError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Misconfigured experiment (unresolved blueprint input, bad config file, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Simulation rollout produced a non-finite state. Carries the step index.
class RolloutError : public std::runtime_error {
 public:
  RolloutError(std::string what, int step = -1)
      : std::runtime_error(std::move(what)), step(step) {}
  int step;
};

class OptimizerError : public std::runtime_error {
 public:
  OptimizerError(std::string what, int parameter = -1)
      : std::runtime_error(std::move(what)), parameter(parameter) {}
  int parameter;
};

}  // namespace diffsim
