#pragma once

namespace vine {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace vine
