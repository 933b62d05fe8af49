#pragma once

namespace ocsyn {

inline constexpr const char kVersion[] = "0.1.0";

}  // namespace ocsyn
