// errors.hpp — exception hierarchy shared by all resetmap headers.

#pragma once

#include <stdexcept>
#include <string>

namespace resetmap {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class NotHermitianError : public Error {
 public:
  explicit NotHermitianError(const std::string& what) : Error(what) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(what) {}
};

class DimensionMismatchError : public Error {
 public:
  explicit DimensionMismatchError(const std::string& what) : Error(what) {}
};

class NonUnitaryError : public Error {
 public:
  explicit NonUnitaryError(const std::string& what) : Error(what) {}
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& what) : Error(what) {}
};

// S/E partition problems: overlap, gaps, out-of-range indices.
class PartitionError : public Error {
 public:
  explicit PartitionError(const std::string& what) : Error(what) {}
};

class MultiLevelSystemError : public Error {
 public:
  explicit MultiLevelSystemError(const std::string& what) : Error(what) {}
};

class ResetSpecError : public Error {
 public:
  explicit ResetSpecError(const std::string& what) : Error(what) {}
};

class StepTooLargeError : public Error {
 public:
  explicit StepTooLargeError(const std::string& what) : Error(what) {}
};

class TooFewPointsError : public Error {
 public:
  explicit TooFewPointsError(const std::string& what) : Error(what) {}
};

class GridError : public Error {
 public:
  explicit GridError(const std::string& what) : Error(what) {}
};

// Disagreement between two internal computation routes; signals a bug,
// not a user error.
class InternalCheckError : public Error {
 public:
  explicit InternalCheckError(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace resetmap
