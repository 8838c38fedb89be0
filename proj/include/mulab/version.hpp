#pragma once

namespace mulab {

inline constexpr const char* kToolName = "mulab";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kCsvSchemaVersion = 1;

} // namespace mulab
