#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mfm {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised by the integrators when a state component becomes NaN or Inf.
class NonFiniteError : public Error {
public:
  NonFiniteError(double t, std::size_t field, std::size_t index)
      : Error("non-finite value at t=" + std::to_string(t) + " (field " + std::to_string(field) +
              ", index " + std::to_string(index) + "); reduce dt"),
        time(t), field_index(field), grid_index(index) {}
  double time;
  std::size_t field_index;
  std::size_t grid_index;
};

class ParseError : public Error {
public:
  ParseError(int line, std::string key, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line(line), key(std::move(key)) {}
  int line;
  std::string key;
};

class ValidationError : public Error {
public:
  ValidationError(std::string key, std::string constraint)
      : Error("invalid value for '" + key + "': " + constraint),
        key(std::move(key)), constraint(std::move(constraint)) {}
  std::string key;
  std::string constraint;
};

class ShapeError : public Error {
public:
  using Error::Error;
};

class QuadratureFailure : public Error {
public:
  using Error::Error;
};

/// No secondary equilibrium root in the search box.
class EmptyResult : public Error {
public:
  using Error::Error;
};

class EmptyInterval : public Error {
public:
  using Error::Error;
};

class InfeasibleTheta : public Error {
public:
  using Error::Error;
};

class InvalidRho : public Error {
public:
  using Error::Error;
};

/// The trajectory left the nonnegative cone, so the Lyapunov inequality does not apply.
class ConeViolation : public Error {
public:
  using Error::Error;
};

} // namespace mfm
