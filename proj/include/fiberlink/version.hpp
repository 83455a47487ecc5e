#pragma once

namespace fiberlink {
inline constexpr const char* kVersion = "0.1.0";
}
