#pragma once

namespace carbonfund {

inline constexpr const char* kVersion = "0.1.0";

} // namespace carbonfund
