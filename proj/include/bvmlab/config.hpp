#pragma once

#include <string>

#include "bvmlab/bvm_lab.hpp"
#include "bvmlab/error.hpp"

namespace bvmlab {

// Config failure tied to a `section.key` field name.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(ErrorCode::ConfigInvalid, message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Flat `[section] key = value` file.  Unknown sections or keys are rejected.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

}  // namespace bvmlab
