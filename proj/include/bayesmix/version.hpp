#pragma once

namespace bayesmix {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kRunRecordSchemaVersion = 1;

}  // namespace bayesmix
