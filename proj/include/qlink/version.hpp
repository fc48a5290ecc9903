#pragma once

namespace qlink {

inline constexpr const char* kVersion = "0.1.0";

} // namespace qlink
