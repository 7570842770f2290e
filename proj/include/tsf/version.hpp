#pragma once

namespace tsf {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace tsf
