#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ttfsim {

/// Invalid parameter or configuration value.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Tensor/layer dimensions do not chain.
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed IDX container. `offset` is the byte position at which the
/// problem was detected.
struct IdxError : std::runtime_error {
  IdxError(const std::string& msg, std::size_t offset_)
      : std::runtime_error(msg + " (byte offset " + std::to_string(offset_) + ")"),
        offset(offset_) {}
  std::size_t offset;
};

/// Training loss became NaN/inf.
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Checkpoint failed schema or hash validation.
struct CheckpointError : std::runtime_error {
  explicit CheckpointError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ttfsim
