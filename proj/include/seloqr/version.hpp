#pragma once

namespace seloqr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace seloqr
