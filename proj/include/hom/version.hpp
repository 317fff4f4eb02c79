#pragma once

namespace hom {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace hom
