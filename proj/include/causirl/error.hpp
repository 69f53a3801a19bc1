#pragma once

#include <stdexcept>
#include <string>

namespace causirl {

/// Base of every error raised by the library. `kind()` is a stable short tag
/// used by the CLI for machine-parsable error lines.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define CAUSIRL_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& message) : Error(tag, message) {}    \
  };

CAUSIRL_DEFINE_ERROR(ConfigError, "config")
CAUSIRL_DEFINE_ERROR(ShapeError, "shape")
CAUSIRL_DEFINE_ERROR(DegenerateBatchError, "degenerate-batch")
CAUSIRL_DEFINE_ERROR(DegenerateColumnError, "degenerate-column")
CAUSIRL_DEFINE_ERROR(InputError, "input")
CAUSIRL_DEFINE_ERROR(NumericError, "numeric")
CAUSIRL_DEFINE_ERROR(ContractError, "contract")
CAUSIRL_DEFINE_ERROR(ParseError, "parse")
CAUSIRL_DEFINE_ERROR(IoError, "io")
CAUSIRL_DEFINE_ERROR(IntegrityError, "integrity")

#undef CAUSIRL_DEFINE_ERROR

}  // namespace causirl
