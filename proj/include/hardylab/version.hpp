#pragma once

namespace hardylab {

inline constexpr const char* kArtifactName = "hardylab";
inline constexpr const char* kArtifactVersion = "0.1.0";

} // namespace hardylab
