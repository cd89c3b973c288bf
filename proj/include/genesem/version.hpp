#pragma once

namespace genesem {
inline constexpr const char* kVersion = "0.1.0";
}
