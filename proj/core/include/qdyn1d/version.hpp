#pragma once

namespace qdyn1d {
inline constexpr const char* kVersion = "0.1.0";
}
