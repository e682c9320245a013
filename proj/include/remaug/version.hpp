#pragma once

namespace remaug {

inline constexpr const char* kToolName = "remaug";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace remaug
