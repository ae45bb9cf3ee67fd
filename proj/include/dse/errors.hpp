#pragma once

#include <stdexcept>
#include <string>

namespace dse {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File missing or unreadable.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed npy file: bad magic, unsupported dtype, wrong ndim.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Input values violate a data invariant (NaN/Inf, all-zero matrix).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Requested sample size exceeds the number of available images.
class SampleError : public Error {
 public:
  using Error::Error;
};

/// Invalid clustering request (k > m, k < 2 where two clusters are needed).
class ClusterError : public Error {
 public:
  using Error::Error;
};

/// Shape mismatch between points, labels, or centroids.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Checkpoint series too short or inconsistent for lambda estimation.
class SeriesError : public Error {
 public:
  using Error::Error;
};

/// Paired series have different lengths.
class LengthError : public Error {
 public:
  using Error::Error;
};

}  // namespace dse
