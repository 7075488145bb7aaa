#pragma once

#include <stdexcept>
#include <string>

namespace hmpn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (|alpha| >= 1, non-finite input).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two independent evaluations of the same quantity disagree.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

class RealizabilityError : public Error {
 public:
  RealizabilityError(const std::string& what, int index = -1, int cell = -1)
      : Error(what), index_(index), cell_(cell) {}
  int index() const { return index_; }
  int cell() const { return cell_; }

 private:
  int index_;
  int cell_;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// A time step produced non-finite or negative-energy moments.
class BlowUpDetected : public Error {
 public:
  BlowUpDetected(const std::string& what, int cell, double time)
      : Error(what), cell_(cell), time_(time) {}
  int cell() const { return cell_; }
  double time() const { return time_; }

 private:
  int cell_;
  double time_;
};

class NewtonDivergence : public Error {
 public:
  NewtonDivergence(const std::string& what, int cell, double residual)
      : Error(what), cell_(cell), residual_(residual) {}
  int cell() const { return cell_; }
  double residual() const { return residual_; }

 private:
  int cell_;
  double residual_;
};

class UnknownProblem : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, std::string key)
      : Error(what), line_(line), key_(std::move(key)) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::string key)
      : Error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class MeshMismatch : public Error {
 public:
  using Error::Error;
};

class IOError : public Error {
 public:
  using Error::Error;
};

}  // namespace hmpn
