#pragma once

#include <stdexcept>
#include <string>

namespace agentlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rejected input value: out-of-range index, unknown id, bad symbol.
struct InputError : Error {
  using Error::Error;
};

// Spec-file / experiment-config parsing and validation.
struct ConfigError : Error {
  using Error::Error;
};

// A transition function was consulted on a state it does not cover.
struct SpecGapError : Error {
  using Error::Error;
};

// Tape configuration inconsistent with the machine's alphabets.
struct MalformedConfigError : Error {
  using Error::Error;
};

// Embedding construction failed an invariant.
struct ConstructionError : Error {
  using Error::Error;
};

// Predictor not applicable to the requested system or horizon.
struct PredictorError : Error {
  using Error::Error;
};

}  // namespace agentlab
