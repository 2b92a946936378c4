#pragma once

#include <stdexcept>
#include <string>

namespace gom {

/// Base class for every error raised by the library. The CLI maps the
/// category to its process exit code.
class Error : public std::runtime_error {
 public:
  enum class Category { kInput, kNumeric, kPrecondition };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

// Input / configuration problems.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(Category::kInput, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(Category::kInput, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Category::kInput, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(Category::kInput, what) {}
};

// Numerical failures inside the pipeline.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(Category::kNumeric, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double condition)
      : Error(Category::kNumeric, what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class DegenerateGeometryError : public Error {
 public:
  explicit DegenerateGeometryError(const std::string& what) : Error(Category::kNumeric, what) {}
};

/// A numeric error annotated with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.category(), stage + ": " + cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// Mathematical preconditions of an operation that the caller violated.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(Category::kPrecondition, what) {}
};

class ValidityError : public Error {
 public:
  explicit ValidityError(const std::string& what) : Error(Category::kPrecondition, what) {}
};

}  // namespace gom
