#pragma once

namespace spreg {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace spreg
