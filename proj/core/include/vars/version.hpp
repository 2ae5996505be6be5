#pragma once

namespace vars {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace vars
