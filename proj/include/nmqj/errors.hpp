#pragma once

#include <stdexcept>
#include <string>

namespace nmqj {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// quantum-core
class ZeroNorm : public Error {
  public:
    using Error::Error;
};
class DimensionMismatch : public Error {
  public:
    using Error::Error;
};
class NotHermitian : public Error {
  public:
    using Error::Error;
};

// reservoir
class NegativeTime : public Error {
  public:
    using Error::Error;
};
class InvalidParameter : public Error {
  public:
    using Error::Error;
};

// engine
class StepTooLarge : public Error {
  public:
    using Error::Error;
};
class SourceEmpty : public Error {
  public:
    using Error::Error;
};

// oracle
class UnsupportedModel : public Error {
  public:
    using Error::Error;
};

// cli-harness
class ParseError : public Error {
  public:
    ParseError(const std::string& what, int line, std::string field)
        : Error(what), line_(line), field_(std::move(field)) {}
    int line() const { return line_; }
    const std::string& field() const { return field_; }

  private:
    int line_;
    std::string field_;
};
class ValidationError : public Error {
  public:
    using Error::Error;
};
class GridMismatch : public Error {
  public:
    using Error::Error;
};

}  // namespace nmqj
