#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cdrl/metrics.hpp"

namespace cdrl {

struct CurvePoint {
  long long global_step = 0;
  double smoothed_reward = 0.0;
};

// Episode rewards of the target task sorted by global step, exponentially
// smoothed with s_{k+1} = 0.9 s_k + 0.1 r_{k+1} (s_0 = first reward).
// Teacher-task and alignment records are skipped.
std::vector<CurvePoint> smoothed_reward_curve(
    const std::vector<MetricsRecord>& records);

// CSV with header "mode,global_step,smoothed_reward", one block per curve.
void write_plotdata_csv(
    std::ostream& out,
    const std::vector<std::pair<std::string, std::vector<CurvePoint>>>& curves);

}  // namespace cdrl
