#pragma once

namespace sjl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sjl
