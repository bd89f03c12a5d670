#include "cdrl/diagnostics.hpp"

#include <cmath>

#include "cdrl/agentnet.hpp"
#include "cdrl/errors.hpp"
#include "cdrl/rng.hpp"

namespace cdrl {

namespace {

constexpr std::uint64_t kTagEvalEpisode = 0x6576616cULL;

Vec64 policy_logits_for(const MlpSpec& spec, const ParamSet& params,
                        const Observation& obs) {
  MlpOutputs out = mlp_forward(spec, params, obs.features);
  return out.heads[spec.head_index("policy")];
}

}  // namespace

EvalResult evaluate_policy(const MlpSpec& spec, const ParamSet& params,
                           Env& env, int episodes, bool greedy,
                           std::uint64_t seed) {
  if (episodes < 1) throw ParameterError("evaluate_policy: episodes must be >= 1");
  if (spec.head_width("policy") != env.descriptor().action_dim) {
    throw ConfigError("checkpoint action space does not match environment");
  }
  if (spec.input_dim != env.descriptor().obs_dim) {
    throw ConfigError("checkpoint observation space does not match environment");
  }

  SplitMix64 rng(seed_stream(seed, kTagEvalEpisode));
  double sum = 0.0, sum_sq = 0.0;
  for (int e = 0; e < episodes; ++e) {
    Observation obs = env.reset(seed_stream(seed, kTagEvalEpisode, 1 + static_cast<std::uint64_t>(e)));
    double total = 0.0;
    while (!env.terminal()) {
      const Vec64 logits = policy_logits_for(spec, params, obs);
      const int action = greedy ? greedy_action(logits) : sample_action(logits, rng);
      StepResult sr = env.step(action);
      total += sr.reward;
      obs = sr.observation;
    }
    sum += total;
    sum_sq += total * total;
  }
  EvalResult r;
  r.episodes = episodes;
  r.mean = sum / episodes;
  const double var = sum_sq / episodes - r.mean * r.mean;
  r.stddev = std::sqrt(var > 0.0 ? var : 0.0);
  return r;
}

ActionDistTable action_distribution(const MlpSpec& spec, const ParamSet& params,
                                    Env& env, long long steps,
                                    std::uint64_t seed,
                                    const AlignmentNetwork* align) {
  if (steps < 1) throw ParameterError("action_distribution: steps must be >= 1");
  const EnvDescriptor& desc = env.descriptor();
  if (spec.input_dim != desc.obs_dim) {
    throw ConfigError("checkpoint observation space does not match environment");
  }
  const int policy_dim = spec.head_width("policy");
  if (align) {
    if (align->input_dim != policy_dim) {
      throw ConfigError("alignment input does not match checkpoint action space");
    }
    if (align->output_dim != desc.action_dim) {
      throw ConfigError("alignment output does not match environment action space");
    }
  } else if (policy_dim != desc.action_dim) {
    throw ConfigError("checkpoint action space does not match environment");
  }

  ActionDistTable table;
  table.labels = desc.action_labels;
  table.mean_probs.assign(static_cast<std::size_t>(desc.action_dim), 0.0);

  SplitMix64 rng(seed_stream(seed, kTagEvalEpisode));
  std::uint64_t episode = 0;
  Observation obs = env.reset(seed_stream(seed, kTagEvalEpisode, 1 + episode));
  for (long long s = 0; s < steps; ++s) {
    Vec64 logits = policy_logits_for(spec, params, obs);
    if (align) logits = align_forward(*align, logits);
    const Vec64 probs = softmax_tempered(logits, 1.0);
    for (std::size_t i = 0; i < probs.size(); ++i) table.mean_probs[i] += probs[i];
    table.states += 1;
    StepResult sr = env.step(sample_action(logits, rng));
    obs = sr.terminal ? env.reset(seed_stream(seed, kTagEvalEpisode, 1 + ++episode))
                      : sr.observation;
  }
  for (double& p : table.mean_probs) p /= static_cast<double>(table.states);
  return table;
}

}  // namespace cdrl
