#pragma once

#include <utility>
#include <vector>

#include "cdrl/agentnet.hpp"
#include "cdrl/diffcore.hpp"
#include "cdrl/envsuite.hpp"

namespace cdrl {

struct RolloutStep {
  Observation obs;
  int action = 0;
  double reward = 0.0;
  double value_estimate = 0.0;
  Vec64 policy_logits;
  Vec64 distill_logits;
  Vec64 teacher_logits;  // empty until the step counter passes the
                         // alignment start threshold (or without a teacher)
};

// One worker segment: up to t_max steps ending at a terminal state or the
// rollout cap. bootstrap_value is 0 when terminal.
struct Rollout {
  std::vector<RolloutStep> steps;
  double bootstrap_value = 0.0;
  bool terminal = false;
};

struct GaeResult {
  Vec64 advantages;
  Vec64 returns;
};

// Teacher/student logit pairs used for distillation and alignment training.
struct LogitsBatch {
  std::vector<std::pair<Vec64, Vec64>> pairs;  // (teacher, student)
  double tau = 1.0;
};

// Backward recursion over temporal-difference residuals:
//   delta_i = r_i + gamma * v_{i+1} - v_i   (v_{i+1} of the last step is the
//   bootstrap), A = delta_i + gamma*lambda*A, R = r_i + gamma*R, with A
//   starting at 0 and R at the bootstrap value.
// Accepts gamma in [0, 1] and lambda in [0, 1].
GaeResult gae(const Vec64& rewards, const Vec64& values, double bootstrap,
              double gamma, double lambda);

// -sum p_i ln p_i with 0 ln 0 == 0. Input must be a valid distribution.
double entropy(const Vec64& probabilities);

struct KlResult {
  double loss = 0.0;
  std::vector<Vec64> student_logit_grads;  // per pair
};

// loss = sum_t sum_i p_t(i) ln(p_t(i)/q_t(i)) with p_t the tempered teacher
// distribution softmax(teacher/tau) and q_t = softmax(student) at tau = 1.
// The gradient w.r.t. student logits is q_t - p_t; no gradient reaches the
// teacher side.
KlResult kl_distill_loss(const LogitsBatch& batch);

struct LossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

// Summed over the rollout: policy term -log pi(a_i|s_i) * A_i with the
// advantage treated as a constant, value term value_coef * (R_i - v_i)^2,
// and -entropy_coef * H(pi(.|s_i)). Returns dLoss/dParams.
ParamSet actor_critic_grads(const Rollout& rollout, const StudentNetwork& net,
                            const GaeResult& gae_result, double entropy_coef,
                            double value_coef = 0.5,
                            LossStats* stats = nullptr);

struct DistillResult {
  double loss = 0.0;
  ParamSet grads;
};

// KL of the student's distill head against fixed (already aligned) teacher
// logits. Gradients flow through the distill head and shared trunk only; the
// policy head receives exactly zero gradient. Both loss and gradient are
// scaled by `weight`.
DistillResult deep_kd_loss(const StudentNetwork& net,
                           const std::vector<Observation>& observations,
                           const std::vector<Vec64>& aligned_teacher_logits,
                           double tau, double weight = 1.0);

// KL straight into the policy head (homogeneous distillation, and the naive
// heterogeneous route). Gradients flow through the policy head and trunk.
DistillResult policy_kd_loss(const StudentNetwork& net,
                             const std::vector<Observation>& observations,
                             const std::vector<Vec64>& teacher_logits,
                             double tau, double weight = 1.0);

}  // namespace cdrl
