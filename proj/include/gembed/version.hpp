#pragma once

namespace gembed {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gembed
