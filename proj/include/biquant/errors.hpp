#pragma once

#include <stdexcept>
#include <string>

namespace biquant {

// Input that is well-formed text but violates a structural rule.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable or unwritable file, or unparseable text.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace biquant
