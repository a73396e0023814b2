#pragma once

#include <stdexcept>
#include <string>

namespace paprlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wrong sequence length, odd bit count, mismatched shapes.
class InputShapeError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range scalar parameter (L < 1, band windows that do not fit, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// All-zero input where a nonzero power is required.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment/model configuration. `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Non-finite loss during optimization.
class TrainingError : public Error {
 public:
  TrainingError(int epoch, const std::string& what)
      : Error("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace paprlab
