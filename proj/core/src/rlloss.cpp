#include "cdrl/rlloss.hpp"

#include <cmath>
#include <string>

#include "cdrl/errors.hpp"

namespace cdrl {

GaeResult gae(const Vec64& rewards, const Vec64& values, double bootstrap,
              double gamma, double lambda) {
  if (rewards.empty()) throw ShapeError("gae: empty rollout");
  if (rewards.size() != values.size()) {
    throw ShapeError("gae: rewards length " + std::to_string(rewards.size()) +
                     " != values length " + std::to_string(values.size()));
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ParameterError("gae: gamma must lie in [0, 1]");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ParameterError("gae: lambda must lie in [0, 1]");
  }

  const std::size_t n = rewards.size();
  GaeResult out;
  out.advantages.resize(n);
  out.returns.resize(n);
  double advantage = 0.0;
  double ret = bootstrap;
  for (std::size_t i = n; i-- > 0;) {
    const double next_value = i + 1 < n ? values[i + 1] : bootstrap;
    const double delta = rewards[i] + gamma * next_value - values[i];
    advantage = delta + gamma * lambda * advantage;
    ret = rewards[i] + gamma * ret;
    out.advantages[i] = advantage;
    out.returns[i] = ret;
  }
  return out;
}

double entropy(const Vec64& probabilities) {
  if (probabilities.empty()) throw ParameterError("entropy: empty distribution");
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !(p <= 1.0)) {
      throw ParameterError("entropy: entry outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ParameterError("entropy: probabilities sum to " + std::to_string(sum));
  }
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

KlResult kl_distill_loss(const LogitsBatch& batch) {
  if (batch.pairs.empty()) throw ShapeError("kl_distill_loss: empty batch");
  if (!(batch.tau > 0.0)) throw ParameterError("kl_distill_loss: tau must be positive");

  KlResult out;
  out.student_logit_grads.reserve(batch.pairs.size());
  for (const auto& [teacher, student] : batch.pairs) {
    if (teacher.size() != student.size()) {
      throw ShapeError("kl_distill_loss: pair dimensions differ");
    }
    // Both sides go through log_softmax so that identical logits at tau = 1
    // give exactly zero loss and gradient.
    Vec64 scaled = teacher;
    for (double& v : scaled) v /= batch.tau;
    const Vec64 log_p = log_softmax(scaled);
    const Vec64 log_q = log_softmax(student);
    Vec64 grad(student.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < log_p.size(); ++i) {
      const double p = std::exp(log_p[i]);
      loss += p * (log_p[i] - log_q[i]);
      grad[i] = std::exp(log_q[i]) - p;
    }
    out.loss += loss;
    out.student_logit_grads.push_back(std::move(grad));
  }
  return out;
}

ParamSet actor_critic_grads(const Rollout& rollout, const StudentNetwork& net,
                            const GaeResult& gae_result, double entropy_coef,
                            double value_coef, LossStats* stats) {
  const std::size_t n = rollout.steps.size();
  if (n == 0) throw ShapeError("actor_critic_grads: empty rollout");
  if (gae_result.advantages.size() != n || gae_result.returns.size() != n) {
    throw ShapeError("actor_critic_grads: GAE result does not match rollout");
  }

  const std::size_t policy_head = net.spec.head_index("policy");
  const std::size_t value_head = net.spec.head_index("value");
  const int d = net.action_dim;

  ParamSet total = ParamSet::zeros(net.params.layout);
  LossStats acc;

  for (std::size_t t = 0; t < n; ++t) {
    const RolloutStep& step = rollout.steps[t];
    MlpOutputs out = mlp_forward(net.spec, net.params, step.obs.features);
    const Vec64& logits = out.heads[policy_head];
    const double v = out.heads[value_head][0];
    const Vec64 probs = softmax_tempered(logits, 1.0);
    const Vec64 logp = log_softmax(logits);

    const double adv = gae_result.advantages[t];
    const double ret = gae_result.returns[t];
    const double h = entropy(probs);

    // Heads other than policy/value (the distill head) get zero gradient.
    std::vector<Vec64> head_grads(net.spec.heads.size());
    for (std::size_t i = 0; i < net.spec.heads.size(); ++i) {
      head_grads[i].assign(static_cast<std::size_t>(net.spec.heads[i].width), 0.0);
    }

    // d(-log pi(a))/dz = pi - onehot(a); entropy term adds
    // entropy_coef * p_j (log p_j + H).
    Vec64 dpolicy(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      double g = adv * (probs[ju] - (j == step.action ? 1.0 : 0.0));
      g += entropy_coef * probs[ju] * (logp[ju] + h);
      dpolicy[ju] = g;
    }
    head_grads[policy_head] = std::move(dpolicy);
    head_grads[value_head] = {value_coef * 2.0 * (v - ret)};

    MlpGradients g = mlp_backward(net.spec, net.params, out.tape, head_grads);
    axpy(total, g.params, 1.0);

    acc.policy_loss += -logp[static_cast<std::size_t>(step.action)] * adv;
    acc.value_loss += value_coef * (ret - v) * (ret - v);
    acc.entropy += h;
  }
  if (stats) *stats = acc;
  return total;
}

namespace {

DistillResult kd_loss_into_head(const StudentNetwork& net,
                                const std::vector<Observation>& observations,
                                const std::vector<Vec64>& supervision_logits,
                                double tau, double weight,
                                const char* head_name) {
  if (observations.empty()) throw ShapeError("distillation: empty batch");
  if (observations.size() != supervision_logits.size()) {
    throw ShapeError("distillation: observation/logits count mismatch");
  }
  const std::size_t head = net.spec.head_index(head_name);
  const int d = net.spec.heads[head].width;

  DistillResult out;
  out.grads = ParamSet::zeros(net.params.layout);
  for (std::size_t t = 0; t < observations.size(); ++t) {
    if (static_cast<int>(supervision_logits[t].size()) != d) {
      throw ShapeError("distillation: supervision logits dimension " +
                       std::to_string(supervision_logits[t].size()) +
                       " != head width " + std::to_string(d));
    }
    MlpOutputs fwd = mlp_forward(net.spec, net.params, observations[t].features);
    LogitsBatch batch;
    batch.tau = tau;
    batch.pairs.emplace_back(supervision_logits[t], fwd.heads[head]);
    KlResult kl = kl_distill_loss(batch);
    out.loss += weight * kl.loss;

    std::vector<Vec64> head_grads(net.spec.heads.size());
    for (std::size_t h = 0; h < net.spec.heads.size(); ++h) {
      head_grads[h].assign(static_cast<std::size_t>(net.spec.heads[h].width), 0.0);
    }
    for (int j = 0; j < d; ++j) {
      head_grads[head][static_cast<std::size_t>(j)] =
          weight * kl.student_logit_grads[0][static_cast<std::size_t>(j)];
    }
    MlpGradients g = mlp_backward(net.spec, net.params, fwd.tape, head_grads);
    axpy(out.grads, g.params, 1.0);
  }
  return out;
}

}  // namespace

DistillResult deep_kd_loss(const StudentNetwork& net,
                           const std::vector<Observation>& observations,
                           const std::vector<Vec64>& aligned_teacher_logits,
                           double tau, double weight) {
  return kd_loss_into_head(net, observations, aligned_teacher_logits, tau,
                           weight, "distill");
}

DistillResult policy_kd_loss(const StudentNetwork& net,
                             const std::vector<Observation>& observations,
                             const std::vector<Vec64>& teacher_logits,
                             double tau, double weight) {
  return kd_loss_into_head(net, observations, teacher_logits, tau, weight,
                           "policy");
}

}  // namespace cdrl
