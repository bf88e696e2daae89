#pragma once

#include <stdexcept>
#include <string>

namespace racsep {

enum class ErrorKind {
  FieldMismatch,
  UnsupportedShape,
  InvalidInput,
  Parameter,
  Resource,
  Structural,
  Io,
};

/// Base of every error thrown by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class FieldMismatchError : public Error {
 public:
  explicit FieldMismatchError(const std::string& what) : Error(ErrorKind::FieldMismatch, what) {}
};

class UnsupportedShapeError : public Error {
 public:
  explicit UnsupportedShapeError(const std::string& what) : Error(ErrorKind::UnsupportedShape, what) {}
};

class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& what) : Error(ErrorKind::InvalidInput, what) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorKind::Parameter, what) {}
};

/// A configured size budget would be exceeded; `required` is the count that was asked for.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, double required)
      : Error(ErrorKind::Resource, what), required_(required) {}
  [[nodiscard]] double required() const noexcept { return required_; }

 private:
  double required_;
};

class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& what) : Error(ErrorKind::Structural, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace racsep
