#pragma once

namespace curbflow {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace curbflow
