#pragma once

#include <stdexcept>
#include <string>

namespace disorder {

/// A problem instance that violates the model assumptions.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration document that cannot be turned into a ModelSpec.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An observation with zero probability under every candidate kernel, or a
/// vanishing normalizer in one of the Bayes updates.
class SupportError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation that would exceed its configured cost budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace disorder
