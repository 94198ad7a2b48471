#pragma once

namespace softmodes {

inline constexpr const char* kVersion = "softmodes 0.1.0";

}  // namespace softmodes
