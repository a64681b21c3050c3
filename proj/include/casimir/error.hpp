#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidMediumError : public Error {
 public:
  using Error::Error;
};

class InvalidGeometryError : public Error {
 public:
  using Error::Error;
};

/// Particle touches or penetrates the substrate (gap <= 0).
class ContactError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

/// The spectral variable diverges (particle and ambient permittivities coincide).
class DivergentSpectralVariableError : public Error {
 public:
  using Error::Error;
};

class ContractViolationError : public Error {
 public:
  using Error::Error;
};

/// An eigenvalue left (0, 1): truncation too small for the gap, or contact.
class UnphysicalModeError : public Error {
 public:
  UnphysicalModeError(const std::string& what, int m, int mode_index, double value)
      : Error(what), m_(m), mode_index_(mode_index), value_(value) {}
  int m() const noexcept { return m_; }
  int mode_index() const noexcept { return mode_index_; }
  double value() const noexcept { return value_; }

 private:
  int m_;
  int mode_index_;
  double value_;
};

class PoleError : public Error {
 public:
  PoleError(const std::string& what, int mode_index) : Error(what), mode_index_(mode_index) {}
  int mode_index() const noexcept { return mode_index_; }

 private:
  int mode_index_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int l_max_reached, double last_rel_change)
      : Error(what), l_max_reached_(l_max_reached), last_rel_change_(last_rel_change) {}
  int l_max_reached() const noexcept { return l_max_reached_; }
  double last_rel_change() const noexcept { return last_rel_change_; }

 private:
  int l_max_reached_;
  double last_rel_change_;
};

class UndefinedExponentError : public Error {
 public:
  using Error::Error;
};

/// Boundary-element mesh too coarse for the requested accuracy.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, std::string key)
      : Error(what), line_(line), key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

}  // namespace casimir
