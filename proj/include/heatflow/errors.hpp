#pragma once

#include <stdexcept>
#include <string>

namespace heatflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A non-finite integrand value inside the integration domain.
class NumericFailure : public Error {
 public:
  NumericFailure(const std::string& what, double node)
      : Error(what), node_(node) {}
  explicit NumericFailure(const std::string& what) : Error(what) {}

  double node() const { return node_; }

 private:
  double node_ = 0.0;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

// Density requested for a model with point-mass components.
class SingularDensity : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what), line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace heatflow
