#pragma once

namespace phonoq {

inline constexpr const char* kArtifactName = "phonoq";
inline constexpr const char* kVersion = "1.0.0";

}  // namespace phonoq
