#pragma once

namespace rrflow {

inline constexpr char kVersion[] = "0.1.0";

}  // namespace rrflow
