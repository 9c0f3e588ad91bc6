#ifndef DEEPMPR_COMMON_HPP_
#define DEEPMPR_COMMON_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace deepmpr {

// Nodes are dense 0-based ids within one scenario.
using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

using Seconds = double;

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PastEvent : public Error {
 public:
  using Error::Error;
};

class UnknownNode : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class OpenEpisode : public Error {
 public:
  using Error::Error;
};

class NonFiniteGradient : public Error {
 public:
  using Error::Error;
};

class ZeroGoodput : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

// A config problem located at a dotted field path.
struct FieldError {
  std::string field;
  std::string reason;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<FieldError> errors);
  ConfigError(std::string field, std::string reason);

  const std::vector<FieldError>& errors() const { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

}  // namespace deepmpr

#endif  // DEEPMPR_COMMON_HPP_
