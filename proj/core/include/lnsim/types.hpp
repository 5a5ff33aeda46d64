#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace lnsim {

// Amounts are kept as signed 64-bit integers; fee arithmetic never leaves
// the integer domain.
using Satoshi = std::int64_t;
using Millisat = std::int64_t;

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;
using ChannelIndex = std::uint32_t;

inline constexpr NodeIndex kNoNode = std::numeric_limits<NodeIndex>::max();
inline constexpr EdgeIndex kNoEdge = std::numeric_limits<EdgeIndex>::max();

constexpr Millisat to_msat(Satoshi sat) { return sat * 1000; }
constexpr double to_sat(Millisat msat) { return static_cast<double>(msat) / 1000.0; }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input. Carries the offending file and 1-based line (0 when the
/// error is not tied to a line).
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(std::move(file)), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Well-formed input that violates a data invariant (duplicate channel
/// direction, capacity mismatch, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A caller broke a precondition. Never a recoverable simulation event.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lnsim
