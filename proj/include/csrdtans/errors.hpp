#pragma once

#include <stdexcept>
#include <string>

namespace csrdtans {

// A compressed stream or container that cannot be decoded: exhausted input,
// an unused slot, or symbols inconsistent with the matrix shape.
class CorruptStreamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The encoder met a state transition that the decoder could not invert.
class UnrepresentableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace csrdtans
