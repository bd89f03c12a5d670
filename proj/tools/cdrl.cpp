#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdrl/agentnet.hpp"
#include "cdrl/alignnet.hpp"
#include "cdrl/checkpoint.hpp"
#include "cdrl/config.hpp"
#include "cdrl/diagnostics.hpp"
#include "cdrl/envsuite.hpp"
#include "cdrl/errors.hpp"
#include "cdrl/metrics.hpp"
#include "cdrl/orchestrator.hpp"
#include "cdrl/plotdata.hpp"

namespace {

namespace fs = std::filesystem;
using namespace cdrl;

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed,
              std::optional<int> workers, const std::string& out_dir) {
  ExperimentSpec spec = load_run_config(config_path);
  if (seed) spec.config.seed = *seed;
  if (workers) spec.workers = *workers;
  if (const char* env_threads = std::getenv("CDRL_THREADS")) {
    spec.workers = std::stoi(env_threads);
  }
  run_experiment(spec, out_dir);
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& env_name,
             int episodes, bool greedy, std::uint64_t seed) {
  NetworkCheckpoint ckpt = checkpoint_load(ckpt_path);
  auto env = make_env(env_name, seed);
  EvalResult r = evaluate_policy(ckpt.spec, ckpt.params, *env, episodes,
                                 greedy, seed);
  std::cout << "mean=" << r.mean << " std=" << r.stddev
            << " episodes=" << r.episodes << "\n";
  return 0;
}

int cmd_action_dist(const std::string& ckpt_path, const std::string& env_name,
                    long long steps, const std::string& align_path,
                    std::uint64_t seed) {
  NetworkCheckpoint ckpt = checkpoint_load(ckpt_path);
  auto env = make_env(env_name, seed);

  std::optional<AlignmentNetwork> align;
  if (!align_path.empty()) {
    NetworkCheckpoint ackpt = checkpoint_load(align_path);
    AlignmentNetwork a;
    a.spec = ackpt.spec;
    a.params = std::move(ackpt.params);
    a.input_dim = a.spec.input_dim;
    a.output_dim = a.spec.head_width("out");
    align = std::move(a);
  }

  ActionDistTable table = action_distribution(
      ckpt.spec, ckpt.params, *env, steps, seed, align ? &*align : nullptr);
  std::cout << "action\tlabel\tmean_prob\n";
  for (std::size_t i = 0; i < table.mean_probs.size(); ++i) {
    std::cout << i << '\t' << table.labels[i] << '\t' << table.mean_probs[i]
              << '\n';
  }
  std::cout << "# states=" << table.states << "\n";
  return 0;
}

int cmd_align_offline(const std::string& teacher_path,
                      const std::string& expert_path,
                      const std::string& env_name, int steps,
                      const std::string& out_path, std::uint64_t seed,
                      double tau, int collect) {
  NetworkCheckpoint tc = checkpoint_load(teacher_path);
  NetworkCheckpoint ec = checkpoint_load(expert_path);
  auto env = make_env(env_name, seed);

  TeacherNetwork teacher{tc.spec, std::move(tc.params), {}};
  teacher.env.name = "checkpoint";
  teacher.env.action_dim = teacher.spec.head_width("policy");
  teacher.env.obs_dim = teacher.spec.input_dim;
  TeacherNetwork expert{ec.spec, std::move(ec.params), env->descriptor()};
  if (expert.spec.head_width("policy") != env->descriptor().action_dim ||
      expert.spec.input_dim != env->descriptor().obs_dim) {
    throw ConfigError("expert checkpoint does not match environment");
  }

  OfflineAlignConfig cfg;
  cfg.seed = seed;
  cfg.tau = tau;
  cfg.collect_states = collect;
  AlignmentNetwork net = offline_train_alignment(teacher, expert, *env, steps, cfg);
  checkpoint_save(out_path, net.spec, net.params);
  std::cout << "alignment checkpoint written to " << out_path << "\n";
  return 0;
}

int cmd_plotdata(const std::vector<std::string>& run_dirs) {
  std::vector<std::pair<std::string, std::vector<CurvePoint>>> curves;
  for (const std::string& dir : run_dirs) {
    const fs::path metrics_path = fs::path(dir) / "metrics.jsonl";
    if (!fs::exists(metrics_path)) {
      throw FormatError("no metrics.jsonl in '" + dir + "'");
    }
    std::string mode = "unknown";
    const fs::path cfg_path = fs::path(dir) / "config.resolved";
    if (fs::exists(cfg_path)) {
      mode = mode_name(load_run_config(cfg_path.string()).mode);
    }
    curves.emplace_back(mode,
                        smoothed_reward_curve(read_metrics(metrics_path.string())));
  }
  write_plotdata_csv(std::cout, curves);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cdrl: collaborative asynchronous actor-critic training on "
               "built-in toy environments"};
  app.require_subcommand(1);

  // train
  std::string train_config, train_out;
  std::optional<std::uint64_t> train_seed;
  std::optional<int> train_workers;
  auto* train = app.add_subcommand("train", "Run a training experiment");
  train->add_option("config", train_config, "Run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--seed", train_seed, "Override the config seed");
  train->add_option("--workers", train_workers, "Override the worker count");
  train->add_option("--out", train_out, "Run directory")->required();

  // eval
  std::string eval_ckpt, eval_env;
  int eval_episodes = 100;
  bool eval_greedy = false;
  std::uint64_t eval_seed = 1;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("checkpoint", eval_ckpt)->required()->check(CLI::ExistingFile);
  eval->add_option("env", eval_env, "catch3 or aimfire5")->required();
  eval->add_option("--episodes", eval_episodes, "Evaluation episodes")
      ->check(CLI::PositiveNumber);
  eval->add_flag("--greedy", eval_greedy, "Act greedily instead of sampling");
  eval->add_option("--seed", eval_seed);

  // action-dist
  std::string ad_ckpt, ad_env, ad_align;
  long long ad_steps = 10000;
  std::uint64_t ad_seed = 1;
  auto* ad = app.add_subcommand(
      "action-dist", "Mean action probabilities over visited states");
  ad->add_option("checkpoint", ad_ckpt)->required()->check(CLI::ExistingFile);
  ad->add_option("env", ad_env)->required();
  ad->add_option("--steps", ad_steps)->check(CLI::PositiveNumber);
  ad->add_option("--align", ad_align,
                 "Alignment checkpoint; treat the network as an aligned teacher")
      ->check(CLI::ExistingFile);
  ad->add_option("--seed", ad_seed);

  // align-offline
  std::string ao_teacher, ao_expert, ao_env, ao_out;
  int ao_steps = 20000, ao_collect = 8192;
  std::uint64_t ao_seed = 1;
  double ao_tau = 1.0;
  auto* ao = app.add_subcommand("align-offline",
                                "Train an alignment network offline");
  ao->add_option("--teacher", ao_teacher)->required()->check(CLI::ExistingFile);
  ao->add_option("--expert", ao_expert)->required()->check(CLI::ExistingFile);
  ao->add_option("--env", ao_env, "Target environment")->required();
  ao->add_option("--steps", ao_steps, "Training step budget");
  ao->add_option("--collect", ao_collect, "States to collect");
  ao->add_option("--out", ao_out, "Output checkpoint path")->required();
  ao->add_option("--seed", ao_seed);
  ao->add_option("--tau", ao_tau);

  // plotdata
  std::vector<std::string> pd_dirs;
  auto* pd = app.add_subcommand("plotdata",
                                "Smoothed reward curves as CSV on stdout");
  pd->add_option("run_dirs", pd_dirs, "Run directories")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(train_config, train_seed, train_workers, train_out);
    if (*eval) return cmd_eval(eval_ckpt, eval_env, eval_episodes, eval_greedy, eval_seed);
    if (*ad) return cmd_action_dist(ad_ckpt, ad_env, ad_steps, ad_align, ad_seed);
    if (*ao) {
      return cmd_align_offline(ao_teacher, ao_expert, ao_env, ao_steps, ao_out,
                               ao_seed, ao_tau, ao_collect);
    }
    if (*pd) return cmd_plotdata(pd_dirs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
