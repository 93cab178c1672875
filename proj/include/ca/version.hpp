#pragma once

namespace ca {

inline constexpr const char* kToolkitName = "compressive-analysis";
inline constexpr const char* kToolkitVersion = "0.1.0";

} // namespace ca
