#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace npsr {

// Broad failure classes; the CLI maps each to an exit code.
enum class ErrorClass { usage, data, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
  ErrorClass error_class() const noexcept { return class_; }

 private:
  ErrorClass class_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorClass::usage, "config error: " + what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorClass::data, "io error: " + what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : Error(ErrorClass::data, "parse error at row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class LabelError : public Error {
 public:
  explicit LabelError(const std::string& what) : Error(ErrorClass::data, "label error: " + what) {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what) : Error(ErrorClass::data, "empty input: " + what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorClass::data, "shape error: " + what) {}
};

class DegenerateLabels : public Error {
 public:
  explicit DegenerateLabels(const std::string& what)
      : Error(ErrorClass::data, "degenerate labels: " + what) {}
};

class SpecError : public Error {
 public:
  explicit SpecError(const std::string& what) : Error(ErrorClass::data, "spec error: " + what) {}
};

class TrainingDiverged : public Error {
 public:
  explicit TrainingDiverged(std::size_t epoch)
      : Error(ErrorClass::numeric, "training diverged: non-finite loss in epoch " + std::to_string(epoch)),
        epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

class SingularSystem : public Error {
 public:
  explicit SingularSystem(const std::string& what)
      : Error(ErrorClass::numeric, "singular system: " + what + " (use ridge_lambda > 0)") {}
};

}  // namespace npsr
