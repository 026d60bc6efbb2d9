#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace naesat {

/// Base of every error raised by the library. Each subclass maps to one
/// failure category; the CLI turns categories into exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameters : public Error {
 public:
  using Error::Error;
};

/// A formula references variables outside its range or breaks the
/// sign/width law.
class CorruptInstance : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Exhaustive routines refuse inputs above their size guard.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class InvalidInit : public Error {
 public:
  using Error::Error;
};

class WindowUnreachable : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace naesat
