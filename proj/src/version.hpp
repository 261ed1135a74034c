#pragma once

namespace mgcn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mgcn
