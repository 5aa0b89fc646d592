#pragma once

namespace mtsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mtsim
