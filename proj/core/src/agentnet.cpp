#include "cdrl/agentnet.hpp"

#include <cmath>

#include "cdrl/errors.hpp"

namespace cdrl {

namespace {

std::vector<HiddenLayer> relu_trunk(const std::vector<int>& hidden) {
  std::vector<HiddenLayer> trunk;
  trunk.reserve(hidden.size());
  for (int w : hidden) trunk.push_back({w, Activation::kRelu});
  return trunk;
}

}  // namespace

MlpSpec student_spec(int obs_dim, int action_dim,
                     const std::vector<int>& hidden) {
  MlpSpec spec;
  spec.input_dim = obs_dim;
  spec.hidden = relu_trunk(hidden);
  spec.heads = {{"policy", action_dim}, {"distill", action_dim}, {"value", 1}};
  spec.validate();
  return spec;
}

MlpSpec teacher_spec(int obs_dim, int action_dim,
                     const std::vector<int>& hidden) {
  MlpSpec spec;
  spec.input_dim = obs_dim;
  spec.hidden = relu_trunk(hidden);
  spec.heads = {{"policy", action_dim}, {"value", 1}};
  spec.validate();
  return spec;
}

StudentNetwork make_student(const EnvDescriptor& env,
                            const std::vector<int>& hidden,
                            std::uint64_t seed) {
  StudentNetwork net;
  net.spec = student_spec(env.obs_dim, env.action_dim, hidden);
  net.params = init_mlp_params(net.spec, seed);
  net.action_dim = env.action_dim;
  return net;
}

TeacherNetwork make_teacher(const EnvDescriptor& env,
                            const std::vector<int>& hidden,
                            std::uint64_t seed) {
  TeacherNetwork net;
  net.spec = teacher_spec(env.obs_dim, env.action_dim, hidden);
  net.params = init_mlp_params(net.spec, seed);
  net.env = env;
  return net;
}

PolicyOutput student_forward(const StudentNetwork& net, const Observation& obs) {
  MlpOutputs out = mlp_forward(net.spec, net.params, obs.features);
  PolicyOutput po;
  po.policy_logits = std::move(out.heads[net.spec.head_index("policy")]);
  // Two-headed actors (teacher-task workers) have no distill head.
  for (std::size_t h = 0; h < net.spec.heads.size(); ++h) {
    if (net.spec.heads[h].name == "distill") {
      po.distill_logits = std::move(out.heads[h]);
    }
  }
  po.value = out.heads[net.spec.head_index("value")][0];
  po.tape = std::move(out.tape);
  return po;
}

PolicyOutput teacher_forward(const TeacherNetwork& net, const Observation& obs) {
  MlpOutputs out = mlp_forward(net.spec, net.params, obs.features);
  PolicyOutput po;
  po.policy_logits = std::move(out.heads[net.spec.head_index("policy")]);
  po.value = out.heads[net.spec.head_index("value")][0];
  po.tape = std::move(out.tape);
  return po;
}

int sample_action(const Vec64& policy_logits, SplitMix64& rng) {
  const Vec64 probs = softmax_tempered(policy_logits, 1.0);
  const double u = rng.next_double();
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;  // guards cum < 1 from rounding
}

int greedy_action(const Vec64& policy_logits) {
  if (policy_logits.empty()) throw ShapeError("greedy_action: empty logits");
  int best = 0;
  for (std::size_t i = 1; i < policy_logits.size(); ++i) {
    if (policy_logits[i] > policy_logits[best]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace cdrl
