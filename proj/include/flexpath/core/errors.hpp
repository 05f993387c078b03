#pragma once

#include <stdexcept>
#include <string>

namespace flexpath {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateSegmentError : public Error {
 public:
  using Error::Error;
};

class InfiniteRateError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A segment is longer than the discretization-accuracy cap allows.
class DiscretizationError : public Error {
 public:
  using Error::Error;
};

class DecompositionError : public Error {
 public:
  using Error::Error;
};

class CompressionError : public Error {
 public:
  using Error::Error;
};

/// The requested problem has no feasible point (bad scenario, too-short period, ...).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace flexpath
