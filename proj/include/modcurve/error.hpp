#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modcurve {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModulusMismatch : public Error {
 public:
  ModulusMismatch(unsigned lhs, unsigned rhs)
      : Error("modulus mismatch: " + std::to_string(lhs) + " vs " + std::to_string(rhs)) {}
};

class NotInvertible : public Error {
 public:
  using Error::Error;
};

class NotDivisor : public Error {
 public:
  NotDivisor(unsigned m, unsigned n)
      : Error(std::to_string(m) + " does not divide " + std::to_string(n)) {}
};

class NotSubgroup : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class InvalidAutomorphismGroup : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace modcurve
