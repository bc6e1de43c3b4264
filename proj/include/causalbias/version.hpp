#pragma once

namespace causalbias {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportFormatVersion = "1";

}  // namespace causalbias
