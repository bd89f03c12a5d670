#include "cdrl/orchestrator.hpp"

#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include "cdrl/agentnet.hpp"
#include "cdrl/alignnet.hpp"
#include "cdrl/checkpoint.hpp"
#include "cdrl/config.hpp"
#include "cdrl/envsuite.hpp"
#include "cdrl/errors.hpp"
#include "cdrl/metrics.hpp"
#include "cdrl/rlloss.hpp"
#include "cdrl/rng.hpp"

namespace cdrl {

namespace {

// Substream tags for splitting the master seed.
enum SeedTag : std::uint64_t {
  kTagStudentInit = 1,
  kTagTeacherInit = 2,
  kTagAlignInit = 3,
  kTagAction = 4,
  kTagEnvEpisode = 5,
  kTagAlignSample = 6,
};

const std::pair<Mode, const char*> kModeNames[] = {
    {Mode::kA3c, "a3c"},
    {Mode::kKdOnly, "kd_only"},
    {Mode::kKdGae, "kd_gae"},
    {Mode::kKdPolicyHetero, "kd_policy_hetero"},
    {Mode::kKdDistillHetero, "kd_distill_hetero"},
    {Mode::kDeepKdOffline, "deep_kd_offline"},
    {Mode::kDeepKdOnline, "deep_kd_online"},
    {Mode::kCa3c, "ca3c"},
};

bool mode_uses_teacher(Mode m) { return m != Mode::kA3c; }
bool mode_needs_teacher_checkpoint(Mode m) {
  return mode_uses_teacher(m) && m != Mode::kCa3c;
}
bool mode_uses_alignment(Mode m) {
  return m == Mode::kDeepKdOffline || m == Mode::kDeepKdOnline ||
         m == Mode::kCa3c;
}
bool mode_trains_alignment(Mode m) {
  return m == Mode::kDeepKdOnline || m == Mode::kCa3c;
}
// Distillation target head: policy for homogeneous/naive transfer, the
// dedicated distill head everywhere else.
bool mode_distills_into_policy_head(Mode m) {
  return m == Mode::kKdOnly || m == Mode::kKdGae || m == Mode::kKdPolicyHetero;
}
bool mode_applies_actor_critic(Mode m) { return m != Mode::kKdOnly; }
bool mode_pads_teacher_logits(Mode m) {
  return m == Mode::kKdPolicyHetero || m == Mode::kKdDistillHetero;
}

}  // namespace

Mode parse_mode(const std::string& name) {
  for (const auto& [mode, n] : kModeNames) {
    if (name == n) return mode;
  }
  throw ConfigError("unknown mode '" + name + "'");
}

const std::string& mode_name(Mode mode) {
  static const std::string names[] = {
      "a3c",           "kd_only",         "kd_gae",
      "kd_policy_hetero", "kd_distill_hetero", "deep_kd_offline",
      "deep_kd_online", "ca3c"};
  return names[static_cast<int>(mode)];
}

void WorkerConfig::validate() const {
  if (t_max < 1) throw ConfigError("t_max must be >= 1");
  if (T_max < 1) throw ConfigError("T_max must be >= 1");
  if (T1 < 0 || T1 > T2 || T2 > T_max) {
    throw ConfigError("thresholds must satisfy 0 <= T1 <= T2 <= T_max");
  }
  if (distill_stop < 0) throw ConfigError("distill_stop must be >= 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(entropy_coef >= 0.0)) throw ConfigError("entropy_coef must be >= 0");
  if (!(value_coef >= 0.0)) throw ConfigError("value_coef must be >= 0");
  if (!(distill_weight >= 0.0)) throw ConfigError("distill_weight must be >= 0");
  if (!(lr >= 0.0) || !(align_lr >= 0.0) || !(distill_lr >= 0.0)) {
    throw ConfigError("learning rates must be >= 0");
  }
  if (align_batch < 1) throw ConfigError("align_batch must be >= 1");
  if (align_steps_per_cycle < 1) throw ConfigError("align_steps_per_cycle must be >= 1");
  for (int wdt : hidden) {
    if (wdt < 1) throw ConfigError("hidden widths must be >= 1");
  }
  for (int wdt : align_hidden) {
    if (wdt < 1) throw ConfigError("align_hidden widths must be >= 1");
  }
}

void ExperimentSpec::validate() const {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  env_descriptor(env);  // rejects unknown names
  config.validate();

  const bool has_teacher_ckpt = !teacher_checkpoint.empty();
  const bool has_align_ckpt = !align_checkpoint.empty();
  const bool has_teacher_env = !teacher_env.empty();

  if (mode_needs_teacher_checkpoint(mode) && !has_teacher_ckpt) {
    throw ConfigError("mode " + mode_name(mode) + " requires teacher_checkpoint");
  }
  if (!mode_needs_teacher_checkpoint(mode) && has_teacher_ckpt) {
    throw ConfigError("mode " + mode_name(mode) + " does not take teacher_checkpoint");
  }
  if (mode == Mode::kDeepKdOffline && !has_align_ckpt) {
    throw ConfigError("mode deep_kd_offline requires align_checkpoint");
  }
  if (mode != Mode::kDeepKdOffline && has_align_ckpt) {
    throw ConfigError("mode " + mode_name(mode) + " does not take align_checkpoint");
  }
  if (mode == Mode::kCa3c) {
    if (!has_teacher_env) throw ConfigError("mode ca3c requires teacher_env");
    env_descriptor(teacher_env);
  } else if (has_teacher_env) {
    throw ConfigError("mode " + mode_name(mode) + " does not take teacher_env");
  }
}

GlobalStore::GlobalStore(ParamSet student_init, ParamSet align_init,
                         bool whole_vector_atomic)
    : student_(std::move(student_init)),
      align_(std::move(align_init)),
      whole_vector_(whole_vector_atomic) {
  layer_offsets_.reserve(student_.layout.size() + 1);
  std::size_t off = 0;
  for (const auto& layer : student_.layout) {
    layer_offsets_.push_back(off);
    off += layer.size();
  }
  layer_offsets_.push_back(off);
  layer_mutexes_ = std::make_unique<std::mutex[]>(
      student_.layout.empty() ? 1 : student_.layout.size());
}

ParamSet GlobalStore::snapshot() const {
  if (whole_vector_) {
    std::lock_guard<std::mutex> lock(whole_mutex_);
    return student_;
  }
  ParamSet out;
  out.layout = student_.layout;
  out.data.resize(student_.data.size());
  for (std::size_t l = 0; l < student_.layout.size(); ++l) {
    std::lock_guard<std::mutex> lock(layer_mutexes_[l]);
    std::copy(student_.data.begin() + static_cast<std::ptrdiff_t>(layer_offsets_[l]),
              student_.data.begin() + static_cast<std::ptrdiff_t>(layer_offsets_[l + 1]),
              out.data.begin() + static_cast<std::ptrdiff_t>(layer_offsets_[l]));
  }
  return out;
}

void GlobalStore::apply_gradients(const ParamSet& grads, double lr) {
  if (!same_layout(grads.layout, student_.layout)) {
    throw ShapeError("apply_gradients: gradient layout does not match store");
  }
  if (whole_vector_) {
    std::lock_guard<std::mutex> lock(whole_mutex_);
    for (std::size_t i = 0; i < student_.data.size(); ++i) {
      student_.data[i] -= lr * grads.data[i];
    }
  } else {
    for (std::size_t l = 0; l < student_.layout.size(); ++l) {
      std::lock_guard<std::mutex> lock(layer_mutexes_[l]);
      for (std::size_t i = layer_offsets_[l]; i < layer_offsets_[l + 1]; ++i) {
        student_.data[i] -= lr * grads.data[i];
      }
    }
  }
  if (ledger_enabled_) {
    std::lock_guard<std::mutex> lock(ledger_mutex_);
    for (std::size_t i = 0; i < grads.data.size(); ++i) {
      ledger_[i] += lr * grads.data[i];
    }
  }
}

ParamSet GlobalStore::snapshot_align() const {
  std::lock_guard<std::mutex> lock(align_mutex_);
  return align_;
}

void GlobalStore::publish_align(const ParamSet& params) {
  std::lock_guard<std::mutex> lock(align_mutex_);
  if (!align_.layout.empty() && !same_layout(params.layout, align_.layout)) {
    throw ShapeError("publish_align: layout does not match store");
  }
  align_ = params;
}

void GlobalStore::enable_ledger() {
  std::lock_guard<std::mutex> lock(ledger_mutex_);
  ledger_enabled_ = true;
  ledger_.assign(student_.data.size(), 0.0);
}

Vec64 GlobalStore::ledger() const {
  std::lock_guard<std::mutex> lock(ledger_mutex_);
  return ledger_;
}

namespace {

// Multi-producer single-consumer channel for (teacher, student) logit pairs;
// bounded, oldest entries dropped on overflow.
class AlignPairQueue {
 public:
  explicit AlignPairQueue(std::size_t capacity = 4096) : capacity_(capacity) {}

  void push(std::vector<AlignmentPair> pairs) {
    std::lock_guard<std::mutex> lock(mutex_);
    for (auto& p : pairs) items_.push_back(std::move(p));
    while (items_.size() > capacity_) items_.pop_front();
  }

  std::vector<AlignmentPair> drain() {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<AlignmentPair> out(std::make_move_iterator(items_.begin()),
                                   std::make_move_iterator(items_.end()));
    items_.clear();
    return out;
  }

 private:
  std::size_t capacity_;
  std::deque<AlignmentPair> items_;
  std::mutex mutex_;
};

struct RunContext {
  const ExperimentSpec* spec = nullptr;
  GlobalStore* target_store = nullptr;
  GlobalStore* teacher_store = nullptr;
  AlignPairQueue* align_queue = nullptr;
  MetricsWriter* metrics = nullptr;
  std::chrono::steady_clock::time_point start;
};

// One sequential training loop implementing the per-worker protocol:
// synchronize, roll up to t_max steps, GAE + actor-critic update, then (past
// the step thresholds) alignment training and distillation.
class Worker {
 public:
  Worker(int id, bool teacher_task, const RunContext& ctx,
         std::optional<TeacherNetwork> teacher,
         std::optional<AlignmentNetwork> align)
      : id_(id),
        teacher_task_(teacher_task),
        ctx_(ctx),
        spec_(*ctx.spec),
        cfg_(ctx.spec->config),
        store_(teacher_task ? ctx.teacher_store : ctx.target_store),
        teacher_(std::move(teacher)),
        align_(std::move(align)),
        action_rng_(seed_stream(cfg_.seed, kTagAction, static_cast<std::uint64_t>(id))),
        align_rng_(seed_stream(cfg_.seed, kTagAlignSample, static_cast<std::uint64_t>(id))) {
    const std::string& env_name = teacher_task_ ? spec_.teacher_env : spec_.env;
    env_ = make_env(env_name, episode_seed(0));
    obs_ = env_->observation();
    const EnvDescriptor& desc = env_->descriptor();
    net_.spec = teacher_task_
                    ? teacher_spec(desc.obs_dim, desc.action_dim, cfg_.hidden)
                    : student_spec(desc.obs_dim, desc.action_dim, cfg_.hidden);
    net_.params = ParamSet::zeros(net_.spec.layout());
    net_.action_dim = desc.action_dim;
  }

  bool run_cycle() {
    if (ctx_.target_store->counter() >= cfg_.T_max) return false;

    net_.params = store_->snapshot();
    const bool deep_mode = !teacher_task_ && mode_uses_alignment(spec_.mode);
    if (deep_mode && id_ != 0) align_->params = store_->snapshot_align();
    if (!teacher_task_ && spec_.mode == Mode::kCa3c) {
      teacher_->params = ctx_.teacher_store->snapshot();
    }

    Rollout rollout;
    bool episode_done = false;
    double done_reward = 0.0;
    long long done_index = 0;
    for (int t = 0; t < cfg_.t_max; ++t) {
      PolicyOutput out = student_forward(net_, obs_);
      RolloutStep step;
      step.obs = obs_;
      step.value_estimate = out.value;
      step.policy_logits = std::move(out.policy_logits);
      step.distill_logits = std::move(out.distill_logits);
      if (!teacher_task_ && teacher_ &&
          ctx_.target_store->counter() >= cfg_.T1) {
        step.teacher_logits = teacher_forward(*teacher_, obs_).policy_logits;
      }
      step.action = sample_action(step.policy_logits, action_rng_);
      StepResult sr = env_->step(step.action);
      store_->increment_counter();
      step.reward = sr.reward;
      episode_reward_ += sr.reward;
      rollout.steps.push_back(std::move(step));
      if (sr.terminal) {
        rollout.terminal = true;
        episode_done = true;
        done_reward = episode_reward_;
        done_index = episode_index_;
        ++episode_index_;
        episode_reward_ = 0.0;
        obs_ = env_->reset(episode_seed(++episode_counter_));
        break;
      }
      obs_ = sr.observation;
    }
    rollout.bootstrap_value =
        rollout.terminal ? 0.0 : student_forward(net_, obs_).value;

    Vec64 rewards, values;
    rewards.reserve(rollout.steps.size());
    values.reserve(rollout.steps.size());
    for (const auto& s : rollout.steps) {
      rewards.push_back(s.reward);
      values.push_back(s.value_estimate);
    }
    GaeResult adv = gae(rewards, values, rollout.bootstrap_value, cfg_.gamma,
                        cfg_.lambda);
    LossStats stats;
    ParamSet ac_grads = actor_critic_grads(rollout, net_, adv,
                                           cfg_.entropy_coef, cfg_.value_coef,
                                           &stats);
    if (teacher_task_ || mode_applies_actor_critic(spec_.mode)) {
      store_->apply_gradients(ac_grads, cfg_.lr);
    }

    const long long T_now = ctx_.target_store->counter();
    if (!teacher_task_ && teacher_) {
      run_alignment_phase(rollout, T_now);
      run_distillation_phase(rollout, T_now);
    }

    if (episode_done) {
      MetricsRecord r;
      r.wall_time_s = elapsed_seconds();
      r.global_step = store_->counter();
      r.worker_id = id_;
      r.episode_index = done_index;
      r.episode_reward = done_reward;
      r.policy_loss = stats.policy_loss;
      r.value_loss = stats.value_loss;
      r.entropy = stats.entropy;
      r.distill_loss = last_distill_loss_;
      r.teacher_task = teacher_task_;
      ctx_.metrics->write(r);
    }
    return true;
  }

 private:
  std::uint64_t episode_seed(std::uint64_t episode) const {
    return seed_stream(cfg_.seed, kTagEnvEpisode,
                       (static_cast<std::uint64_t>(id_) << 32) | episode);
  }

  double elapsed_seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         ctx_.start)
        .count();
  }

  void run_alignment_phase(const Rollout& rollout, long long T_now) {
    if (!mode_trains_alignment(spec_.mode)) return;
    if (T_now < cfg_.T1) return;
    if (cfg_.freeze_align_after_t2 && T_now >= cfg_.T2) return;

    std::vector<AlignmentPair> pairs;
    for (const auto& step : rollout.steps) {
      if (step.teacher_logits.empty()) continue;
      pairs.push_back({step.teacher_logits, step.policy_logits});
    }
    if (pairs.empty()) return;

    if (id_ != 0) {
      ctx_.align_queue->push(std::move(pairs));
      return;
    }
    for (auto& p : pairs) align_buffer_.push_back(std::move(p));
    for (auto& p : ctx_.align_queue->drain()) align_buffer_.push_back(std::move(p));
    while (align_buffer_.size() > kAlignBufferCap) {
      align_buffer_.erase(align_buffer_.begin());
    }

    double loss_sum = 0.0;
    std::vector<AlignmentPair> batch(
        std::min<std::size_t>(align_buffer_.size(),
                              static_cast<std::size_t>(cfg_.align_batch)));
    for (int k = 0; k < cfg_.align_steps_per_cycle; ++k) {
      for (auto& slot : batch) {
        slot = align_buffer_[static_cast<std::size_t>(
            align_rng_.next_below(align_buffer_.size()))];
      }
      loss_sum += align_train_step(*align_, batch, cfg_.tau, cfg_.align_lr);
    }
    store_->publish_align(align_->params);

    MetricsRecord r;
    r.wall_time_s = elapsed_seconds();
    r.global_step = store_->counter();
    r.worker_id = id_;
    r.align_loss = loss_sum / (cfg_.align_steps_per_cycle *
                               static_cast<double>(batch.size()));
    ctx_.metrics->write(r);
  }

  void run_distillation_phase(const Rollout& rollout, long long T_now) {
    if (T_now < cfg_.T2) return;
    if (cfg_.distill_stop > 0 && T_now >= cfg_.distill_stop) {
      last_distill_loss_.reset();
      return;
    }

    std::vector<Observation> observations;
    std::vector<Vec64> supervision;
    for (const auto& step : rollout.steps) {
      if (step.teacher_logits.empty()) continue;
      observations.push_back(step.obs);
      if (mode_uses_alignment(spec_.mode)) {
        supervision.push_back(align_forward(*align_, step.teacher_logits));
      } else if (mode_pads_teacher_logits(spec_.mode)) {
        supervision.push_back(pad_or_truncate(step.teacher_logits, net_.action_dim));
      } else {
        supervision.push_back(step.teacher_logits);
      }
    }
    if (observations.empty()) return;

    DistillResult dr =
        mode_distills_into_policy_head(spec_.mode)
            ? policy_kd_loss(net_, observations, supervision, cfg_.tau)
            : deep_kd_loss(net_, observations, supervision, cfg_.tau);
    store_->apply_gradients(dr.grads, cfg_.distill_lr * cfg_.distill_weight);
    last_distill_loss_ = dr.loss / static_cast<double>(observations.size());
  }

  static constexpr std::size_t kAlignBufferCap = 4096;

  int id_;
  bool teacher_task_;
  RunContext ctx_;
  const ExperimentSpec& spec_;
  const WorkerConfig& cfg_;
  GlobalStore* store_;
  std::optional<TeacherNetwork> teacher_;
  std::optional<AlignmentNetwork> align_;
  AlignmentDataset align_buffer_;
  std::unique_ptr<Env> env_;
  Observation obs_;
  StudentNetwork net_;
  SplitMix64 action_rng_;
  SplitMix64 align_rng_;
  std::uint64_t episode_counter_ = 0;
  long long episode_index_ = 0;
  double episode_reward_ = 0.0;
  std::optional<double> last_distill_loss_;
};

EnvDescriptor checkpoint_descriptor(const MlpSpec& spec) {
  EnvDescriptor d;
  d.name = "checkpoint";
  try {
    d.action_dim = spec.head_width("policy");
  } catch (const ShapeError&) {
    throw ConfigError("teacher checkpoint has no policy head");
  }
  d.obs_dim = spec.input_dim;
  return d;
}

}  // namespace

void run_experiment(const ExperimentSpec& spec, const std::string& out_dir) {
  spec.validate();
  const WorkerConfig& cfg = spec.config;
  const EnvDescriptor& target = env_descriptor(spec.env);

  // Wire every network before touching the filesystem, so bad specs fail
  // before any worker starts or any output is created.
  std::optional<TeacherNetwork> teacher;
  if (mode_needs_teacher_checkpoint(spec.mode)) {
    NetworkCheckpoint ckpt = checkpoint_load(spec.teacher_checkpoint);
    TeacherNetwork t;
    t.spec = ckpt.spec;
    t.params = std::move(ckpt.params);
    t.env = checkpoint_descriptor(t.spec);
    if (t.env.obs_dim != target.obs_dim) {
      throw ConfigError("teacher checkpoint observes dim " +
                        std::to_string(t.env.obs_dim) + ", environment has " +
                        std::to_string(target.obs_dim));
    }
    const bool same_dims = t.env.action_dim == target.action_dim;
    if ((spec.mode == Mode::kKdOnly || spec.mode == Mode::kKdGae) && !same_dims) {
      throw ConfigError("homogeneous distillation requires matching action "
                        "spaces (teacher " + std::to_string(t.env.action_dim) +
                        ", target " + std::to_string(target.action_dim) + ")");
    }
    if (mode_pads_teacher_logits(spec.mode) && same_dims) {
      throw ConfigError("heterogeneous modes require differing action spaces");
    }
    teacher = std::move(t);
  } else if (spec.mode == Mode::kCa3c) {
    const EnvDescriptor& tdesc = env_descriptor(spec.teacher_env);
    if (tdesc.obs_dim != target.obs_dim) {
      throw ConfigError("ca3c teacher task observes a different space");
    }
    teacher = make_teacher(tdesc, cfg.hidden,
                           seed_stream(cfg.seed, kTagTeacherInit));
  }

  std::optional<AlignmentNetwork> align;
  if (spec.mode == Mode::kDeepKdOffline) {
    NetworkCheckpoint ckpt = checkpoint_load(spec.align_checkpoint);
    AlignmentNetwork a;
    a.spec = ckpt.spec;
    a.params = std::move(ckpt.params);
    a.input_dim = a.spec.input_dim;
    a.output_dim = a.spec.head_width("out");
    if (a.input_dim != teacher->env.action_dim || a.output_dim != target.action_dim) {
      throw ConfigError("alignment checkpoint maps " +
                        std::to_string(a.input_dim) + "->" +
                        std::to_string(a.output_dim) + ", need " +
                        std::to_string(teacher->env.action_dim) + "->" +
                        std::to_string(target.action_dim));
    }
    align = std::move(a);
  } else if (mode_trains_alignment(spec.mode)) {
    align = make_alignment_network(teacher->env.action_dim, target.action_dim,
                                   seed_stream(cfg.seed, kTagAlignInit),
                                   cfg.align_hidden);
  }

  StudentNetwork student = make_student(
      target, cfg.hidden, seed_stream(cfg.seed, kTagStudentInit));

  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "checkpoints");
  {
    std::ofstream cfg_out(fs::path(out_dir) / "config.resolved",
                          std::ios::trunc);
    cfg_out << emit_resolved_config(spec);
  }

  // Single-worker runs use the strict whole-vector store so traces are exact.
  const bool strict = spec.workers == 1;
  GlobalStore target_store(student.params,
                           align ? align->params : ParamSet{}, strict);
  std::optional<GlobalStore> teacher_store;
  if (spec.mode == Mode::kCa3c) {
    teacher_store.emplace(teacher->params, ParamSet{}, strict);
  }

  AlignPairQueue queue;
  MetricsWriter metrics((fs::path(out_dir) / "metrics.jsonl").string());
  RunContext ctx;
  ctx.spec = &spec;
  ctx.target_store = &target_store;
  ctx.teacher_store = teacher_store ? &*teacher_store : nullptr;
  ctx.align_queue = &queue;
  ctx.metrics = &metrics;
  ctx.start = std::chrono::steady_clock::now();

  std::vector<std::unique_ptr<Worker>> workers;
  for (int i = 0; i < spec.workers; ++i) {
    workers.push_back(std::make_unique<Worker>(i, /*teacher_task=*/false, ctx,
                                               teacher, align));
  }
  if (spec.mode == Mode::kCa3c) {
    for (int i = 0; i < spec.workers; ++i) {
      workers.push_back(std::make_unique<Worker>(spec.workers + i,
                                                 /*teacher_task=*/true, ctx,
                                                 std::nullopt, std::nullopt));
    }
  }

  if (spec.workers == 1) {
    // Deterministic mode: every loop advances round-robin in this thread.
    bool any = true;
    while (any) {
      any = false;
      for (auto& w : workers) any = w->run_cycle() || any;
    }
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers.size());
    for (auto& w : workers) {
      threads.emplace_back([&w] {
        while (w->run_cycle()) {
        }
      });
    }
    for (auto& t : threads) t.join();
  }

  const long long final_step = target_store.counter();
  checkpoint_save((fs::path(out_dir) / "checkpoints" /
                   ("student-" + std::to_string(final_step) + ".ckpt"))
                      .string(),
                  student.spec, target_store.snapshot());
  if (align) {
    const ParamSet align_params = mode_trains_alignment(spec.mode)
                                      ? target_store.snapshot_align()
                                      : align->params;
    checkpoint_save((fs::path(out_dir) / "checkpoints" /
                     ("align-" + std::to_string(final_step) + ".ckpt"))
                        .string(),
                    align->spec, align_params);
  }
  if (teacher_store) {
    checkpoint_save((fs::path(out_dir) / "checkpoints" /
                     ("teacher-" + std::to_string(final_step) + ".ckpt"))
                        .string(),
                    teacher->spec, teacher_store->snapshot());
  }
}

}  // namespace cdrl
