#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsasvr {

// Coarse classification used by the C API and the CLI exit codes.
enum class ErrorKind {
  Input,        // caller supplied malformed arguments
  Data,         // ingestion / data-shape problems
  Estimation,   // embedding parameter estimation failed
  Training,     // SVR solver failed to converge
  Evaluation,   // objective produced a non-finite value
  Degenerate,   // statistically undefined comparison
  Persistence,  // report could not be read or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string& what)
      : Error(ErrorKind::Estimation, what) {}
};

class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, std::size_t iterations)
      : Error(ErrorKind::Training, what), iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& what)
      : Error(ErrorKind::Evaluation, what) {}
};

class DegenerateComparisonError : public Error {
 public:
  explicit DegenerateComparisonError(const std::string& what)
      : Error(ErrorKind::Degenerate, what) {}
};

class PersistenceError : public Error {
 public:
  explicit PersistenceError(const std::string& what)
      : Error(ErrorKind::Persistence, what) {}
};

}  // namespace gsasvr
