#pragma once

namespace agentlab {

inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace agentlab
