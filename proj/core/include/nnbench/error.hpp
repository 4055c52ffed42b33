#pragma once

#include <stdexcept>
#include <string>

namespace nnbench {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid layer/network/netspec content. `path()` points at the offending
/// field, e.g. "layers[3].hyperparams.out_channels".
class SpecError : public Error {
 public:
  SpecError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Raised when a configuration is too large to execute or trace; callers are
/// expected to fall back to the analytic characterization path.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Backend does not implement the requested layer kind or feature.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Plugin loading or worker protocol failure.
class BackendError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace nnbench
