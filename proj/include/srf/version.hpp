#pragma once

namespace srf {

inline constexpr const char* kVersion = "0.1.0";

}
