#include "cdrl/alignnet.hpp"

#include <algorithm>
#include <cmath>

#include "cdrl/errors.hpp"
#include "cdrl/rlloss.hpp"
#include "cdrl/rng.hpp"

namespace cdrl {

AlignmentNetwork make_alignment_network(int teacher_dim, int student_dim,
                                        std::uint64_t seed,
                                        const std::vector<int>& hidden) {
  AlignmentNetwork net;
  net.spec.input_dim = teacher_dim;
  for (int w : hidden) net.spec.hidden.push_back({w, Activation::kRelu});
  net.spec.heads = {{"out", student_dim}};
  net.spec.validate();
  net.params = init_mlp_params(net.spec, seed);
  net.input_dim = teacher_dim;
  net.output_dim = student_dim;
  return net;
}

Vec64 align_forward(const AlignmentNetwork& net, const Vec64& teacher_logits) {
  if (static_cast<int>(teacher_logits.size()) != net.input_dim) {
    throw ShapeError("align_forward: logits dimension " +
                     std::to_string(teacher_logits.size()) + " != " +
                     std::to_string(net.input_dim));
  }
  MlpOutputs out = mlp_forward(net.spec, net.params, teacher_logits);
  return out.heads[0];
}

double align_train_step(AlignmentNetwork& net,
                        std::span<const AlignmentPair> batch, double tau,
                        double lr) {
  if (batch.empty()) throw ShapeError("align_train_step: empty batch");

  ParamSet grads = ParamSet::zeros(net.params.layout);
  double loss = 0.0;
  for (const AlignmentPair& pair : batch) {
    if (static_cast<int>(pair.teacher_logits.size()) != net.input_dim ||
        static_cast<int>(pair.student_logits.size()) != net.output_dim) {
      throw ShapeError("align_train_step: pair dimensions do not match network");
    }
    MlpOutputs fwd = mlp_forward(net.spec, net.params, pair.teacher_logits);
    // Target p = softmax(student/tau) fixed; moving side q = softmax(F(teacher)).
    LogitsBatch kl_batch;
    kl_batch.tau = tau;
    kl_batch.pairs.emplace_back(pair.student_logits, fwd.heads[0]);
    KlResult kl = kl_distill_loss(kl_batch);
    loss += kl.loss;
    MlpGradients g = mlp_backward(net.spec, net.params, fwd.tape,
                                  {kl.student_logit_grads[0]});
    axpy(grads, g.params, 1.0);
  }
  axpy(net.params, grads, -lr);
  return loss;
}

namespace {

double dataset_loss(const AlignmentNetwork& net, const AlignmentDataset& data,
                    double tau) {
  double loss = 0.0;
  for (const AlignmentPair& pair : data) {
    LogitsBatch batch;
    batch.tau = tau;
    batch.pairs.emplace_back(pair.student_logits,
                             align_forward(net, pair.teacher_logits));
    loss += kl_distill_loss(batch).loss;
  }
  return loss / static_cast<double>(data.size());
}

}  // namespace

AlignmentNetwork offline_train_alignment(const TeacherNetwork& teacher,
                                         const TeacherNetwork& expert,
                                         Env& env, int steps,
                                         const OfflineAlignConfig& cfg) {
  if (expert.env.action_dim != env.descriptor().action_dim ||
      expert.env.obs_dim != env.descriptor().obs_dim) {
    throw ConfigError("offline_train_alignment: expert does not match environment");
  }
  if (teacher.env.obs_dim != env.descriptor().obs_dim) {
    throw ConfigError("offline_train_alignment: teacher observes a different space");
  }

  AlignmentNetwork net = make_alignment_network(
      teacher.env.action_dim, expert.env.action_dim,
      seed_stream(cfg.seed, /*tag=*/0x616c69676eULL));
  if (steps <= 0) return net;

  // Both networks see the same target-environment states along the expert's
  // own trajectory.
  AlignmentDataset data;
  data.reserve(static_cast<std::size_t>(cfg.collect_states));
  SplitMix64 action_rng(seed_stream(cfg.seed, /*tag=*/1));
  std::uint64_t episode = 0;
  Observation obs = env.reset(seed_stream(cfg.seed, /*tag=*/2, episode));
  while (data.size() < static_cast<std::size_t>(cfg.collect_states)) {
    AlignmentPair pair;
    pair.teacher_logits = teacher_forward(teacher, obs).policy_logits;
    pair.student_logits = teacher_forward(expert, obs).policy_logits;
    const int action = sample_action(pair.student_logits, action_rng);
    data.push_back(std::move(pair));
    StepResult sr = env.step(action);
    obs = sr.terminal ? env.reset(seed_stream(cfg.seed, /*tag=*/2, ++episode))
                      : sr.observation;
  }

  SplitMix64 batch_rng(seed_stream(cfg.seed, /*tag=*/3));
  double window_loss = dataset_loss(net, data, cfg.tau);
  std::vector<AlignmentPair> batch(static_cast<std::size_t>(cfg.batch_size));
  for (int step = 1; step <= steps; ++step) {
    for (auto& slot : batch) {
      slot = data[static_cast<std::size_t>(batch_rng.next_below(data.size()))];
    }
    align_train_step(net, batch, cfg.tau, cfg.lr);
    if (step % cfg.window == 0) {
      const double now = dataset_loss(net, data, cfg.tau);
      if (window_loss - now < cfg.min_rel_improvement * std::abs(window_loss)) {
        break;
      }
      window_loss = now;
    }
  }
  return net;
}

Vec64 pad_or_truncate(const Vec64& logits, int dim) {
  if (dim < 1) throw ShapeError("pad_or_truncate: dim must be >= 1");
  Vec64 out(static_cast<std::size_t>(dim), 0.0);
  const std::size_t n = std::min(logits.size(), out.size());
  std::copy_n(logits.begin(), n, out.begin());
  return out;
}

}  // namespace cdrl
