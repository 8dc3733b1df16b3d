#pragma once

namespace sigsched {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sigsched
