#pragma once

namespace bioverify {

inline constexpr const char* kToolName = "bioverify";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace bioverify
