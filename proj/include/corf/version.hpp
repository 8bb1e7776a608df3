#pragma once

namespace corf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace corf
