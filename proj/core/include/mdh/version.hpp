#pragma once

namespace mdh {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace mdh
