#pragma once

namespace eikograph {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace eikograph
