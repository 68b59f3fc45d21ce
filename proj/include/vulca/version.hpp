#pragma once

namespace vulca {

inline constexpr const char* kVersion = "0.1.0";

// Canonical 47-dimension vector layout identifier. Bump whenever the index
// order or the label roster changes; dumps carry it so mixed-layout files
// are rejected instead of silently misread.
inline constexpr const char* kLayoutVersion = "47d-v1";

// Report JSON schema version.
inline constexpr const char* kReportSchemaVersion = "1";

}  // namespace vulca
