#pragma once

#include <stdexcept>
#include <string>

namespace citesim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration documents.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed edge-list, gender or CSV input. The message names the line.
class IngestError : public Error {
 public:
  using Error::Error;
};

/// Operation invoked on an object in an unusable state (e.g. an empty estimate).
class StateError : public Error {
 public:
  using Error::Error;
};

/// A walk reached a node with no neighbors.
class WalkError : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined for its inputs (e.g. zero expected proportion).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// A statistical test received degenerate data.
class TestError : public Error {
 public:
  using Error::Error;
};

}  // namespace citesim
