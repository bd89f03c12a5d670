#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>
#include <vector>

#include "cdrl/agentnet.hpp"
#include "cdrl/checkpoint.hpp"
#include "cdrl/config.hpp"
#include "cdrl/envsuite.hpp"
#include "cdrl/errors.hpp"
#include "cdrl/metrics.hpp"
#include "cdrl/orchestrator.hpp"
#include "cdrl/rng.hpp"
#include "test_helpers.hpp"

using namespace cdrl;
using namespace cdrl::testing;
namespace fs = std::filesystem;

namespace {

ParamLayout toy_layout() {
  return {{"a", 2, 3, true}, {"b", 3, 2, false}, {"c", 1, 4, true}};
}

std::string fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cdrl_test_" + name);
  fs::remove_all(p);
  return p.string();
}

// metrics.jsonl with the wall-time field stripped from every line.
std::string metrics_fingerprint(const std::string& run_dir) {
  std::string out;
  for (const MetricsRecord& r : read_metrics(run_dir + "/metrics.jsonl")) {
    MetricsRecord stripped = r;
    stripped.wall_time_s = 0.0;
    out += metrics_to_json_line(stripped);
    out += '\n';
  }
  return out;
}

long long final_step_from_checkpoint(const std::string& run_dir) {
  for (const auto& entry : fs::directory_iterator(run_dir + "/checkpoints")) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("student-", 0) == 0) {
      return std::stoll(name.substr(8, name.size() - 8 - 5));
    }
  }
  return -1;
}

}  // namespace

TEST_CASE("GlobalStore snapshot/apply sequential semantics") {
  ParamSet init = ParamSet::zeros(toy_layout());
  for (std::size_t i = 0; i < init.data.size(); ++i) init.data[i] = static_cast<double>(i);
  GlobalStore store(init);

  CHECK(store.snapshot().data == init.data);

  ParamSet g = ParamSet::zeros(toy_layout());
  for (double& v : g.data) v = 2.0;
  store.apply_gradients(g, 0.25);
  ParamSet after = store.snapshot();
  for (std::size_t i = 0; i < after.data.size(); ++i) {
    CHECK(after.data[i] == init.data[i] - 0.5);
  }
  store.apply_gradients(g, 0.25);
  after = store.snapshot();
  for (std::size_t i = 0; i < after.data.size(); ++i) {
    CHECK(after.data[i] == init.data[i] - 1.0);
  }

  ParamSet zero = ParamSet::zeros(toy_layout());
  store.apply_gradients(zero, 123.0);
  CHECK(store.snapshot().data == after.data);

  ParamSet wrong = ParamSet::zeros({{"a", 2, 3, true}});
  CHECK_THROWS_AS(store.apply_gradients(wrong, 0.1), ShapeError);

  CHECK(store.counter() == 0);
  CHECK(store.increment_counter() == 1);
  CHECK(store.counter() == 1);
}

TEST_CASE("concurrent appliers produce the exact total displacement") {
  // lr and gradients are powers of two, so repeated subtraction is exact.
  for (int n_workers : {2, 8}) {
    ParamSet init = ParamSet::zeros(toy_layout());
    GlobalStore store(init);
    const int applies_each = 500;
    ParamSet ones = ParamSet::zeros(toy_layout());
    for (double& v : ones.data) v = 1.0;

    std::vector<std::thread> threads;
    for (int w = 0; w < n_workers; ++w) {
      threads.emplace_back([&] {
        for (int i = 0; i < applies_each; ++i) store.apply_gradients(ones, 0.5);
      });
    }
    for (auto& t : threads) t.join();

    const double want = -0.5 * n_workers * applies_each;
    for (double v : store.snapshot().data) CHECK(v == want);
  }
}

TEST_CASE("snapshot never observes a torn layer") {
  // Writers bump whole layers by uniform per-layer sentinel values; any
  // torn read inside a layer shows up as a non-uniform layer.
  ParamSet init = ParamSet::zeros(toy_layout());
  GlobalStore store(init);
  std::atomic<bool> stop{false};
  std::atomic<int> violations{0};

  std::vector<std::thread> writers;
  for (int w = 0; w < 4; ++w) {
    writers.emplace_back([&] {
      ParamSet g = ParamSet::zeros(toy_layout());
      for (std::size_t l = 0; l < g.layout.size(); ++l) {
        double* data = g.layer_data(l);
        for (std::size_t i = 0; i < g.layout[l].size(); ++i) {
          data[i] = static_cast<double>(l + 1);
        }
      }
      while (!stop.load()) store.apply_gradients(g, 1.0);
    });
  }
  std::vector<std::thread> readers;
  for (int r = 0; r < 2; ++r) {
    readers.emplace_back([&] {
      for (int it = 0; it < 2000; ++it) {
        const ParamSet snap = store.snapshot();
        for (std::size_t l = 0; l < snap.layout.size(); ++l) {
          const double* data = snap.layer_data(l);
          for (std::size_t i = 1; i < snap.layout[l].size(); ++i) {
            if (data[i] != data[0]) violations.fetch_add(1);
          }
        }
      }
    });
  }
  for (auto& t : readers) t.join();
  stop.store(true);
  for (auto& t : writers) t.join();
  CHECK(violations.load() == 0);
}

TEST_CASE("ledger accounts for every applied gradient") {
  ParamSet init = ParamSet::zeros(toy_layout());
  for (double& v : init.data) v = 1.0;
  GlobalStore store(init);
  store.enable_ledger();

  SplitMix64 rng(61);
  std::vector<ParamSet> grads;
  for (int i = 0; i < 16; ++i) grads.push_back(random_params(rng, toy_layout()));

  std::vector<std::thread> threads;
  for (int w = 0; w < 4; ++w) {
    threads.emplace_back([&, w] {
      for (int i = 0; i < 200; ++i) {
        store.apply_gradients(grads[static_cast<std::size_t>((w * 7 + i) % 16)], 0.01);
      }
    });
  }
  for (auto& t : threads) t.join();

  const Vec64 ledger = store.ledger();
  const ParamSet final = store.snapshot();
  for (std::size_t i = 0; i < ledger.size(); ++i) {
    CHECK(std::abs((init.data[i] - final.data[i]) - ledger[i]) < 1e-9);
  }
}

TEST_CASE("align param slot is publish/snapshot consistent") {
  ParamSet student = ParamSet::zeros(toy_layout());
  ParamSet align = ParamSet::zeros({{"out", 3, 5, true}});
  GlobalStore store(student, align);
  CHECK(store.snapshot_align().data == align.data);
  for (double& v : align.data) v = 7.0;
  store.publish_align(align);
  CHECK(store.snapshot_align().data == align.data);
  ParamSet wrong = ParamSet::zeros({{"out", 1, 1, true}});
  CHECK_THROWS_AS(store.publish_align(wrong), ShapeError);
}

TEST_CASE("experiment spec validation rejects bad wiring upfront") {
  ExperimentSpec spec;
  spec.env = "catch3";
  spec.config.T_max = 1000;
  spec.config.T1 = 0;
  spec.config.T2 = 0;
  CHECK_NOTHROW(spec.validate());

  ExperimentSpec bad = spec;
  bad.mode = Mode::kKdOnly;  // teacher required but absent
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = spec;
  bad.workers = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = spec;
  bad.env = "breakout";
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = spec;
  bad.config.T1 = 500;
  bad.config.T2 = 400;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = spec;
  bad.teacher_env = "aimfire5";  // only ca3c takes a teacher task
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = spec;
  bad.mode = Mode::kCa3c;
  CHECK_THROWS_AS(bad.validate(), ConfigError);  // ca3c needs teacher_env
  bad.teacher_env = "catch3";
  CHECK_NOTHROW(bad.validate());

  // run_experiment must reject before creating any output.
  ExperimentSpec reject = spec;
  reject.mode = Mode::kKdGae;
  const std::string dir = fresh_dir("reject");
  CHECK_THROWS_AS(run_experiment(reject, dir), ConfigError);
  CHECK(!fs::exists(dir));

  // Dimension clash: homogeneous distillation from a 5-action teacher
  // into a 3-action environment.
  auto [espec, eparams] = optimal_aimfire5_net();
  const std::string ckpt = fresh_dir("ckpt_dim") + ".ckpt";
  checkpoint_save(ckpt, espec, eparams);
  reject.teacher_checkpoint = ckpt;
  CHECK_THROWS_AS(run_experiment(reject, dir), ConfigError);
  CHECK(!fs::exists(dir));

  // Heterogeneous modes require differing action dims.
  auto [cspec, cparams] = optimal_catch3_net();
  const std::string cckpt = fresh_dir("ckpt_c3") + ".ckpt";
  checkpoint_save(cckpt, cspec, cparams);
  ExperimentSpec hetero = spec;
  hetero.mode = Mode::kKdPolicyHetero;
  hetero.teacher_checkpoint = cckpt;
  CHECK_THROWS_AS(run_experiment(hetero, dir), ConfigError);
  CHECK(!fs::exists(dir));
}

TEST_CASE("counter overshoot stays within workers * t_max") {
  ExperimentSpec spec;
  spec.mode = Mode::kA3c;
  spec.env = "catch3";
  spec.workers = 4;
  spec.config.T_max = 1000;
  spec.config.T1 = 0;
  spec.config.T2 = 0;
  spec.config.t_max = 20;
  spec.config.hidden = {8};
  const std::string dir = fresh_dir("overshoot");
  run_experiment(spec, dir);
  const long long final_step = final_step_from_checkpoint(dir);
  CHECK(final_step >= 1000);
  CHECK(final_step <= 1000 + 4 * 20);

  // Episode records from each worker have non-decreasing global steps.
  std::vector<long long> last_step(4, -1);
  for (const MetricsRecord& r : read_metrics(dir + "/metrics.jsonl")) {
    CHECK(r.global_step >= last_step[static_cast<std::size_t>(r.worker_id)]);
    last_step[static_cast<std::size_t>(r.worker_id)] = r.global_step;
  }
}

TEST_CASE("single-worker runs are bit-reproducible; stray checkpoints ignored") {
  auto [cspec, cparams] = optimal_catch3_net();
  const std::string teacher_ckpt = fresh_dir("det_teacher") + ".ckpt";
  checkpoint_save(teacher_ckpt, cspec, cparams);

  ExperimentSpec a3c;
  a3c.mode = Mode::kA3c;
  a3c.env = "catch3";
  a3c.workers = 1;
  a3c.config.T_max = 3000;
  a3c.config.T1 = 0;
  a3c.config.T2 = 0;
  a3c.config.seed = 17;
  a3c.config.hidden = {16, 16};

  const std::string d1 = fresh_dir("det_a");
  run_experiment(a3c, d1);
  // An unused teacher checkpoint sitting in the run directory must not
  // change the trace.
  const std::string d2 = fresh_dir("det_b");
  fs::create_directories(d2);
  fs::copy_file(teacher_ckpt, fs::path(d2) / "stray-teacher.ckpt");
  run_experiment(a3c, d2);
  CHECK(metrics_fingerprint(d1) == metrics_fingerprint(d2));
  CHECK(!metrics_fingerprint(d1).empty());

  ExperimentSpec online;
  online.mode = Mode::kDeepKdOnline;
  online.env = "aimfire5";
  online.teacher_checkpoint = teacher_ckpt;
  online.workers = 1;
  online.config.T_max = 3000;
  online.config.T1 = 500;
  online.config.T2 = 1000;
  online.config.seed = 23;
  online.config.hidden = {16, 16};
  online.config.align_hidden = {8, 8};

  const std::string d3 = fresh_dir("det_c");
  const std::string d4 = fresh_dir("det_d");
  run_experiment(online, d3);
  run_experiment(online, d4);
  CHECK(metrics_fingerprint(d3) == metrics_fingerprint(d4));

  // Alignment records must exist and checkpoints for all networks written.
  bool has_align = false;
  for (const MetricsRecord& r : read_metrics(d3 + "/metrics.jsonl")) {
    if (r.align_loss) has_align = true;
  }
  CHECK(has_align);
  const long long step = final_step_from_checkpoint(d3);
  CHECK(fs::exists(fs::path(d3) / "checkpoints" /
                   ("align-" + std::to_string(step) + ".ckpt")));

  ExperimentSpec collab;
  collab.mode = Mode::kCa3c;
  collab.env = "aimfire5";
  collab.teacher_env = "catch3";
  collab.workers = 1;
  collab.config.T_max = 2000;
  collab.config.T1 = 200;
  collab.config.T2 = 400;
  collab.config.seed = 31;
  collab.config.hidden = {16, 16};
  collab.config.align_hidden = {8, 8};

  const std::string d5 = fresh_dir("det_e");
  const std::string d6 = fresh_dir("det_f");
  run_experiment(collab, d5);
  run_experiment(collab, d6);
  CHECK(metrics_fingerprint(d5) == metrics_fingerprint(d6));

  // Teacher-task episodes are flagged and the teacher checkpoint exists.
  bool teacher_records = false;
  for (const MetricsRecord& r : read_metrics(d5 + "/metrics.jsonl")) {
    if (r.teacher_task) teacher_records = true;
  }
  CHECK(teacher_records);
  const long long cstep = final_step_from_checkpoint(d5);
  CHECK(fs::exists(fs::path(d5) / "checkpoints" /
                   ("teacher-" + std::to_string(cstep) + ".ckpt")));
}

TEST_CASE("self-distillation from the student's own start is lossless") {
  // Teacher := the student's exact initial parameters (captured via a lr=0
  // run), identity-free homogeneous distillation: the first distillation
  // loss is exactly zero.
  ExperimentSpec freeze;
  freeze.mode = Mode::kA3c;
  freeze.env = "catch3";
  freeze.workers = 1;
  freeze.config.T_max = 1;
  freeze.config.T1 = 0;
  freeze.config.T2 = 0;
  freeze.config.seed = 77;
  freeze.config.lr = 0.0;
  const std::string d0 = fresh_dir("selfd_init");
  run_experiment(freeze, d0);
  const long long step0 = final_step_from_checkpoint(d0);
  const std::string init_ckpt =
      (fs::path(d0) / "checkpoints" / ("student-" + std::to_string(step0) + ".ckpt")).string();

  ExperimentSpec kd;
  kd.mode = Mode::kKdGae;
  kd.env = "catch3";
  kd.teacher_checkpoint = init_ckpt;
  kd.workers = 1;
  kd.config.T_max = 96;
  kd.config.T1 = 0;
  kd.config.T2 = 0;
  kd.config.t_max = 48;  // one full episode per cycle
  kd.config.seed = 77;
  const std::string d1 = fresh_dir("selfd_run");
  run_experiment(kd, d1);

  bool checked = false;
  for (const MetricsRecord& r : read_metrics(d1 + "/metrics.jsonl")) {
    if (r.distill_loss) {
      CHECK(*r.distill_loss == 0.0);
      checked = true;
      break;
    }
  }
  CHECK(checked);
}

TEST_CASE("distill_stop halts distillation gradients") {
  auto [cspec, cparams] = optimal_catch3_net();
  const std::string teacher_ckpt = fresh_dir("stop_teacher") + ".ckpt";
  checkpoint_save(teacher_ckpt, cspec, cparams);

  ExperimentSpec kd;
  kd.mode = Mode::kKdGae;
  kd.env = "catch3";
  kd.teacher_checkpoint = teacher_ckpt;
  kd.workers = 1;
  kd.config.T_max = 4000;
  kd.config.T1 = 0;
  kd.config.T2 = 0;
  kd.config.distill_stop = 1000;
  kd.config.seed = 3;
  kd.config.hidden = {8};
  const std::string dir = fresh_dir("stop_run");
  run_experiment(kd, dir);

  // Records past the stop step must not carry a distillation loss.
  for (const MetricsRecord& r : read_metrics(dir + "/metrics.jsonl")) {
    if (r.global_step > 1100) CHECK(!r.distill_loss.has_value());
  }
}

TEST_CASE("mode names round-trip") {
  for (const char* name :
       {"a3c", "kd_only", "kd_gae", "kd_policy_hetero", "kd_distill_hetero",
        "deep_kd_offline", "deep_kd_online", "ca3c"}) {
    CHECK(mode_name(parse_mode(name)) == name);
  }
  CHECK_THROWS_AS(parse_mode("a2c"), ConfigError);
}
