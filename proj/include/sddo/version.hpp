#pragma once

namespace sddo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sddo
