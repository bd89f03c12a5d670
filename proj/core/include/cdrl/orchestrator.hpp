#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cdrl/diffcore.hpp"

namespace cdrl {

// The experiment recipes. a3c trains from the environment alone; the kd_*
// modes distill from a frozen teacher checkpoint (into the policy head for
// homogeneous/naive-heterogeneous transfer, into the distill head otherwise);
// the deep_kd_* modes route teacher logits through the alignment network
// (pre-trained offline, or trained online from step T1); ca3c trains the
// teacher task concurrently and distills from live teacher snapshots.
enum class Mode {
  kA3c,
  kKdOnly,
  kKdGae,
  kKdPolicyHetero,
  kKdDistillHetero,
  kDeepKdOffline,
  kDeepKdOnline,
  kCa3c,
};

Mode parse_mode(const std::string& name);
const std::string& mode_name(Mode mode);

struct WorkerConfig {
  int t_max = 20;                 // rollout cap
  long long T_max = 300000;       // total environment-step budget
  long long T1 = 20000;           // alignment training start
  long long T2 = 40000;           // distillation start
  long long distill_stop = 0;     // 0 = never stop
  double gamma = 0.9;
  double lambda = 1.0;
  double tau = 1.0;
  double entropy_coef = 0.02;
  double value_coef = 0.5;
  double distill_weight = 1.0;
  double lr = 0.005;              // actor-critic SGD rate
  double align_lr = 0.01;
  double distill_lr = 0.01;
  std::uint64_t seed = 1;
  bool freeze_align_after_t2 = false;
  int align_batch = 64;
  int align_steps_per_cycle = 4;
  std::vector<int> hidden = {64, 64};
  std::vector<int> align_hidden = {32, 32, 32, 32};

  void validate() const;
  bool operator==(const WorkerConfig&) const = default;
};

struct ExperimentSpec {
  Mode mode = Mode::kA3c;
  std::string env;                 // target environment name
  std::string teacher_env;         // ca3c: the teacher's own task
  std::string teacher_checkpoint;  // modes distilling from a frozen teacher
  std::string align_checkpoint;    // deep_kd_offline
  int workers = 8;
  WorkerConfig config;

  // Rejects invalid wiring (missing teacher, dimension clashes, unknown
  // modes/envs) before any worker starts.
  void validate() const;
  bool operator==(const ExperimentSpec&) const = default;
};

// Shared parameter vectors plus the global step counter. snapshot/apply are
// linearizable per layer: a snapshot never observes a half-applied layer,
// and concurrent applies are additive with no lost updates. An optional
// whole-vector mode serializes across the entire vector instead.
class GlobalStore {
 public:
  explicit GlobalStore(ParamSet student_init, ParamSet align_init = {},
                       bool whole_vector_atomic = false);

  ParamSet snapshot() const;
  void apply_gradients(const ParamSet& grads, double lr);

  ParamSet snapshot_align() const;
  void publish_align(const ParamSet& params);

  long long increment_counter() { return ++counter_; }
  long long counter() const { return counter_.load(); }

  // Test instrumentation: records the sum of applied lr*grad vectors so a
  // test can compare total displacement against the ledger.
  void enable_ledger();
  Vec64 ledger() const;

 private:
  ParamSet student_;
  mutable std::unique_ptr<std::mutex[]> layer_mutexes_;
  std::vector<std::size_t> layer_offsets_;
  ParamSet align_;
  mutable std::mutex align_mutex_;
  std::atomic<long long> counter_{0};
  bool whole_vector_;
  mutable std::mutex whole_mutex_;
  bool ledger_enabled_ = false;
  Vec64 ledger_;
  mutable std::mutex ledger_mutex_;
};

// Runs the configured experiment, writing into `out_dir`:
//   config.resolved            full effective configuration
//   metrics.jsonl              one record per episode / alignment epoch
//   checkpoints/{student,teacher,align}-<step>.ckpt
void run_experiment(const ExperimentSpec& spec, const std::string& out_dir);

}  // namespace cdrl
