#pragma once

namespace fraccurve {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fraccurve
