#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdrl/alignnet.hpp"
#include "cdrl/diffcore.hpp"
#include "cdrl/envsuite.hpp"

namespace cdrl {

struct EvalResult {
  double mean = 0.0;
  double stddev = 0.0;
  int episodes = 0;
};

// Runs `episodes` evaluation episodes with fresh per-episode seeds, acting
// from the checkpointed policy head (greedy or sampled).
EvalResult evaluate_policy(const MlpSpec& spec, const ParamSet& params,
                           Env& env, int episodes, bool greedy,
                           std::uint64_t seed);

struct ActionDistTable {
  std::vector<std::string> labels;  // documented action semantics
  Vec64 mean_probs;
  long long states = 0;
};

// Rolls the policy for `steps` environment steps (sampling actions) and
// averages the action distribution over visited states. When `align` is
// given, the checkpoint is treated as a teacher: actions and the averaged
// distribution come from softmax(align(teacher_logits)).
ActionDistTable action_distribution(const MlpSpec& spec, const ParamSet& params,
                                    Env& env, long long steps,
                                    std::uint64_t seed,
                                    const AlignmentNetwork* align = nullptr);

}  // namespace cdrl
