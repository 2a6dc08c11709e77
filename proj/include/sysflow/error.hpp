#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sysflow {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A record violates the invariants of its type (op flags, counters, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A record references an object ID that was not emitted before it.
class OrderingError : public Error {
 public:
  OrderingError(const std::string& what, std::uint64_t oid, std::size_t index)
      : Error(what), oid_(oid), index_(index) {}

  std::uint64_t oid() const { return oid_; }
  /// Position of the offending record in its stream, when known.
  std::size_t index() const { return index_; }

  static constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

 private:
  std::uint64_t oid_;
  std::size_t index_;
};

/// Failure to open, read, or write an external file or stream.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sysflow
