#pragma once

#include <stdexcept>
#include <string>

namespace bp5 {

// Malformed serialized input: bad magic, version, field values, or length.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// The block-assignment constraints admit no solution. For this scheme and
// subsets of size at most five this is never expected; callers treat it as a
// hard failure and the message carries the full instance for replay.
class UnsatisfiableError : public std::runtime_error {
 public:
  explicit UnsatisfiableError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bp5
