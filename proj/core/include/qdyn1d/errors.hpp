#pragma once

#include <stdexcept>
#include <string>

namespace qdyn1d {

/// Base class for all contract violations raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NonPrefixRule : Error {
  using Error::Error;
};
struct InvalidRule : Error {
  using Error::Error;
};
struct WindowTooLarge : Error {
  using Error::Error;
};
struct OutOfWindow : Error {
  using Error::Error;
};
struct NoKnownSpecialEnergy : Error {
  using Error::Error;
};
struct RootFindingFailure : Error {
  using Error::Error;
};
struct RationalInput : Error {
  using Error::Error;
};
struct ZeroCoupling : Error {
  using Error::Error;
};
struct DegenerateReference : Error {
  using Error::Error;
};
struct FiniteSizeViolation : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace qdyn1d
