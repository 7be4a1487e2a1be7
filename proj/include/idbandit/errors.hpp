#pragma once

#include <stdexcept>
#include <string>

namespace idbandit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidActionError : public Error {
 public:
  using Error::Error;
};

// Exact enumeration over stochastic or latent nodes was asked for a diagram
// beyond the enumeration cap.
class EnumerationCapError : public Error {
 public:
  using Error::Error;
};

class PlannerCapError : public Error {
 public:
  using Error::Error;
};

class IncompleteAssignmentError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace idbandit
