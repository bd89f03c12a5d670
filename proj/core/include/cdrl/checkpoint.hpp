#pragma once

#include <string>

#include "cdrl/diffcore.hpp"

namespace cdrl {

// On-disk network format: the magic line "CDRL1", a version line, one UTF-8
// JSON header line encoding the MlpSpec and layer layout, then the parameter
// payload as little-endian 64-bit floats in layout order. Round trips are
// bit-exact for every representable parameter value.
inline constexpr const char* kCheckpointMagic = "CDRL1";
inline constexpr int kCheckpointVersion = 1;

struct NetworkCheckpoint {
  MlpSpec spec;
  ParamSet params;
};

void checkpoint_save(const std::string& path, const MlpSpec& spec,
                     const ParamSet& params);
NetworkCheckpoint checkpoint_load(const std::string& path);

}  // namespace cdrl
