#pragma once

#include <stdexcept>
#include <string>

namespace attestgame {

// Argument outside the domain of an operation (unknown device, count out of
// range, strategy that does not conform to the environment).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The solvers only characterize the single-method game.
class UnsupportedCase : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A threshold was requested for a method that never detects (detection rate 0).
class Undeterrable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Exhaustive enumeration refused because the instance is above the cap.
class EnumerationLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed document. The message names the field path and, for CSV, the line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateFit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace attestgame
