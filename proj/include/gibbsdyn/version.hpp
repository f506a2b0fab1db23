#pragma once

namespace gibbsdyn {
inline constexpr const char* kVersion = "0.1.0";
}
