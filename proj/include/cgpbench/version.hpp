#pragma once

namespace cgpbench {

inline constexpr const char* kEngineVersion = "0.1.0";

} // namespace cgpbench
