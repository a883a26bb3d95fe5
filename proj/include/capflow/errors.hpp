#pragma once

#include <stdexcept>
#include <string>

namespace capflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class PoleError : public Error {
 public:
  using Error::Error;
};

class MeshQualityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class OrientationError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// Raised when a flow leaves the admissible cone of its curvature function.
class ConvexityLoss : public Error {
 public:
  using Error::Error;
};

class WrongTheoremError : public Error {
 public:
  using Error::Error;
};

}  // namespace capflow
