#pragma once

namespace cir {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cir
