#ifndef CIRQUE_ERRORS_HPP
#define CIRQUE_ERRORS_HPP

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace cirque {

namespace detail {

inline std::string format_g(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace detail

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or problem definition (unknown rule, a >= b, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Failure of the numerical procedure itself: crossing limits, non-finite
/// integrand values, tolerances below the roundoff floor.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class RoundoffFloorError : public NumericalError {
 public:
  RoundoffFloorError(double tolerance, double floor)
      : NumericalError("tolerance below roundoff bound: eps = " +
                       detail::format_g(tolerance) +
                       " does not exceed the roundoff floor 4(b-a)D*mu = " +
                       detail::format_g(floor)),
        tolerance_(tolerance),
        floor_(floor) {}

  double tolerance() const noexcept { return tolerance_; }
  double floor() const noexcept { return floor_; }

 private:
  double tolerance_;
  double floor_;
};

/// Syntax or name-resolution error in an expression; position is a 0-based
/// byte offset into the source text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        message_(message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }
  /// The message without the position suffix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  std::size_t position_;
};

}  // namespace cirque

#endif  // CIRQUE_ERRORS_HPP
