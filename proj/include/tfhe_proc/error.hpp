#pragma once

#include <stdexcept>
#include <string>

namespace tfhe_proc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (bad shape, bad length, out-of-range index).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Decoded phase lands in the padding half of the torus.
class PaddingOverflow : public Error {
 public:
  PaddingOverflow() : Error("padding overflow") {}
};

/// Executor referenced an address with nothing stored at it.
class UnmappedAddress : public Error {
 public:
  explicit UnmappedAddress(const std::string& what) : Error("unmapped address: " + what) {}
};

/// Executor found an object of the wrong kind at an address.
class ObjectTypeMismatch : public Error {
 public:
  explicit ObjectTypeMismatch(const std::string& what)
      : Error("object type mismatch: " + what) {}
};

}  // namespace tfhe_proc
