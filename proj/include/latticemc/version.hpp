#pragma once

namespace latticemc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace latticemc
