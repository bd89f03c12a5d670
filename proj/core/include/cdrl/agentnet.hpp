#pragma once

#include <cstdint>
#include <vector>

#include "cdrl/diffcore.hpp"
#include "cdrl/envsuite.hpp"
#include "cdrl/rng.hpp"

namespace cdrl {

// Student: shared trunk with three heads. The policy head alone determines
// behavior; the distillation head receives transferred knowledge without
// dictating actions; the value head estimates discounted return.
struct StudentNetwork {
  MlpSpec spec;
  ParamSet params;
  int action_dim = 0;
};

// Teacher: trunk + policy head + value head, bound to its own environment so
// action-space heterogeneity is checked at wiring time.
struct TeacherNetwork {
  MlpSpec spec;
  ParamSet params;
  EnvDescriptor env;
};

struct PolicyOutput {
  Vec64 policy_logits;
  Vec64 distill_logits;  // empty for teachers
  double value = 0.0;
  MlpTape tape;
};

MlpSpec student_spec(int obs_dim, int action_dim, const std::vector<int>& hidden);
MlpSpec teacher_spec(int obs_dim, int action_dim, const std::vector<int>& hidden);

StudentNetwork make_student(const EnvDescriptor& env,
                            const std::vector<int>& hidden, std::uint64_t seed);
TeacherNetwork make_teacher(const EnvDescriptor& env,
                            const std::vector<int>& hidden, std::uint64_t seed);

// One trunk pass returning all heads. Action probabilities are
// softmax(policy_logits) at tau = 1; the distill head never influences them.
PolicyOutput student_forward(const StudentNetwork& net, const Observation& obs);
PolicyOutput teacher_forward(const TeacherNetwork& net, const Observation& obs);

// Draws from softmax(policy_logits) at tau = 1 by inverse CDF on a single
// uniform draw; cumulative boundaries in lowest-index-first order.
int sample_action(const Vec64& policy_logits, SplitMix64& rng);

// Argmax with ties broken toward the lowest index.
int greedy_action(const Vec64& policy_logits);

}  // namespace cdrl
