#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace cmnls {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, std::complex<double> value)
      : Error(what), value_(value) {}
  std::complex<double> value() const { return value_; }

 private:
  std::complex<double> value_;
};

class OutOfDomainError : public Error {
 public:
  using Error::Error;
};

class InteriorMissingError : public Error {
 public:
  using Error::Error;
};

class GridError : public Error {
 public:
  using Error::Error;
};

class CornerMismatchError : public Error {
 public:
  CornerMismatchError(const std::string& what, std::string location, double magnitude)
      : Error(what), location_(std::move(location)), magnitude_(magnitude) {}
  const std::string& location() const { return location_; }
  double magnitude() const { return magnitude_; }

 private:
  std::string location_;
  double magnitude_;
};

class DecayViolationError : public Error {
 public:
  DecayViolationError(const std::string& what, double x, double magnitude)
      : Error(what), x_(x), magnitude_(magnitude) {}
  double x() const { return x_; }
  double magnitude() const { return magnitude_; }

 private:
  double x_;
  double magnitude_;
};

class CflError : public Error {
 public:
  using Error::Error;
};

class InstabilityError : public Error {
 public:
  using Error::Error;
};

class DomainViolationError : public Error {
 public:
  DomainViolationError(const std::string& what, int column, double growth)
      : Error(what), column_(column), growth_(growth) {}
  int column() const { return column_; }
  double growth() const { return growth_; }

 private:
  int column_;
  double growth_;
};

class RayCrossesBoundaryError : public Error {
 public:
  using Error::Error;
};

class CircleLeavesRegionError : public Error {
 public:
  using Error::Error;
};

class UnresolvedZeroError : public Error {
 public:
  using Error::Error;
};

class DegenerateZeroError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmnls
