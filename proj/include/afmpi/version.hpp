#pragma once

#include <string_view>

namespace afmpi {

inline constexpr std::string_view tool_version = "0.1.0";

} // namespace afmpi
