#pragma once

#include <stdexcept>
#include <string>

namespace latgibbs {

// Malformed arguments, configs, or violated preconditions.
struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An exhaustive search refused to start or continue past its explicit budget.
// The message says which knob to raise or how to shrink the request.
struct resource_limit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A certified quantity was requested outside the region where the
// certificate is valid (e.g. a tail bound at lambda > lambda0).
struct certificate_refusal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace latgibbs
