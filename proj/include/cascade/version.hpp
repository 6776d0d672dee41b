#pragma once

#include <string_view>

namespace cascade {

/// Version tag carried by every CSV and JSON artifact as `spec_version`.
inline constexpr std::string_view kSpecVersion = "1";

} // namespace cascade
