#pragma once

namespace srl {

inline constexpr const char* kToolName = "srlsim";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace srl
