#pragma once

#include <string_view>

namespace cap1d {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace cap1d
