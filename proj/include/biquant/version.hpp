#pragma once

namespace biquant {

inline constexpr const char* kVersion = "1.0.0";
// Bumped whenever a module changes numbers it produces for the same inputs.
inline constexpr const char* kModuleVersions = "poly/1 graph/1 ops/1 gs/1 bracket/1 geometry/2 quantize/1";

}  // namespace biquant
