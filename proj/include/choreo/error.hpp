#pragma once

#include <stdexcept>
#include <string>

namespace choreo {

/// Base class for every error raised by the library. `category()` is a short,
/// stable tag ("collision", "parse", ...) that the CLI prints verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

/// Two bodies occupy the same point (0-based body indices).
class CollisionError : public Error {
 public:
  CollisionError(int first, int second, const std::string& message)
      : Error("collision", message), first_(first), second_(second) {}

  int first() const noexcept { return first_; }
  int second() const noexcept { return second_; }

 private:
  int first_;
  int second_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("domain", message) {}
};

class AliasingError : public Error {
 public:
  explicit AliasingError(const std::string& message) : Error("aliasing", message) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& message) : Error("capacity", message) {}
};

/// The sample count is not a multiple of the lattice modulus of a spec.
class ModulusError : public Error {
 public:
  ModulusError(long modulus, const std::string& message)
      : Error("modulus", message), modulus_(modulus) {}

  long modulus() const noexcept { return modulus_; }

 private:
  long modulus_;
};

class ArityError : public Error {
 public:
  explicit ArityError(const std::string& message) : Error("arity", message) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message) : Error("dimension", message) {}
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error("parse", message), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// A document parsed but a field holds an invalid value; `field()` names it.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error("validation", message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class InapplicableBoundError : public Error {
 public:
  explicit InapplicableBoundError(const std::string& message)
      : Error("inapplicable-bound", message) {}
};

/// Integration stopped because two bodies came closer than the abort threshold.
class CollisionAbort : public Error {
 public:
  CollisionAbort(double time, double separation, const std::string& message)
      : Error("collision-abort", message), time_(time), separation_(separation) {}

  double time() const noexcept { return time_; }
  double separation() const noexcept { return separation_; }

 private:
  double time_;
  double separation_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io", message) {}
};

}  // namespace choreo
