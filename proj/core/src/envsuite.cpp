#include "cdrl/envsuite.hpp"

#include <cstdlib>

#include "cdrl/errors.hpp"
#include "cdrl/rng.hpp"

namespace cdrl {

namespace {

constexpr int kWidth = 7;
constexpr int kRoundsPerEpisode = 8;

// Substream tag for per-round spawn draws; every round's randomness comes
// from seed_stream(episode_seed, kSpawnTag, round), so a round's spawns do
// not depend on how many draws earlier rounds consumed.
constexpr std::uint64_t kSpawnTag = 0x63617463ULL;

int clamp_col(int c) { return c < 0 ? 0 : (c >= kWidth ? kWidth - 1 : c); }

class Catch3Env final : public Env {
 public:
  explicit Catch3Env(std::uint64_t seed) { reset(seed); }

  const EnvDescriptor& descriptor() const override {
    static const EnvDescriptor d{
        "catch3", 3, 3, kRoundsPerEpisode * (kWidth - 1),
        {"stay", "left", "right"}};
    return d;
  }

  Observation reset(std::uint64_t seed) override {
    seed_ = seed;
    paddle_col_ = kWidth / 2;
    drops_done_ = 0;
    terminal_ = false;
    spawn_drop();
    return observation();
  }

  StepResult step(int action) override {
    if (terminal_) throw StateError("catch3: step after terminal");
    if (action < 0 || action >= 3) {
      throw ParameterError("catch3: action out of range");
    }
    if (action == 1) paddle_col_ = clamp_col(paddle_col_ - 1);
    if (action == 2) paddle_col_ = clamp_col(paddle_col_ + 1);
    ball_row_ += 1;

    StepResult r;
    if (ball_row_ == kWidth - 1) {
      r.reward = paddle_col_ == ball_col_ ? 1.0 : -1.0;
      drops_done_ += 1;
      if (drops_done_ == kRoundsPerEpisode) {
        terminal_ = true;
      } else {
        spawn_drop();
      }
    }
    r.observation = observation();
    r.terminal = terminal_;
    return r;
  }

  Observation observation() const override {
    return {{ball_col_ / 6.0, ball_row_ / 6.0, paddle_col_ / 6.0}};
  }

  bool terminal() const override { return terminal_; }

 private:
  void spawn_drop() {
    SplitMix64 rng(seed_stream(seed_, kSpawnTag, static_cast<std::uint64_t>(drops_done_)));
    ball_col_ = static_cast<int>(rng.next_below(kWidth));
    ball_row_ = 0;
  }

  std::uint64_t seed_ = 0;
  int paddle_col_ = 0;
  int ball_col_ = 0;
  int ball_row_ = 0;
  int drops_done_ = 0;
  bool terminal_ = false;
};

constexpr int kRoundSteps = 10;

class AimFire5Env final : public Env {
 public:
  explicit AimFire5Env(std::uint64_t seed) { reset(seed); }

  const EnvDescriptor& descriptor() const override {
    static const EnvDescriptor d{
        "aimfire5", 5, 3, kRoundsPerEpisode * kRoundSteps,
        {"fire", "right", "stay", "left", "long-fire"}};
    return d;
  }

  Observation reset(std::uint64_t seed) override {
    seed_ = seed;
    rounds_done_ = 0;
    terminal_ = false;
    spawn_round();
    return observation();
  }

  StepResult step(int action) override {
    if (terminal_) throw StateError("aimfire5: step after terminal");
    if (action < 0 || action >= 5) {
      throw ParameterError("aimfire5: action out of range");
    }
    StepResult r;
    bool round_over = false;
    if (action == 0) {
      r.reward = agent_col_ == target_col_ ? 1.0 : -1.0;
      round_over = true;
    } else if (action == 4) {
      r.reward = std::abs(agent_col_ - target_col_) <= 1 ? 1.0 : -1.0;
      round_over = true;
    } else {
      if (action == 1) agent_col_ = clamp_col(agent_col_ + 1);
      if (action == 3) agent_col_ = clamp_col(agent_col_ - 1);
      steps_left_ -= 1;
      if (steps_left_ == 0) {
        r.reward = -1.0;
        round_over = true;
      }
    }
    if (round_over) {
      rounds_done_ += 1;
      if (rounds_done_ == kRoundsPerEpisode) {
        terminal_ = true;
      } else {
        spawn_round();
      }
    }
    r.observation = observation();
    r.terminal = terminal_;
    return r;
  }

  Observation observation() const override {
    return {{agent_col_ / 6.0, target_col_ / 6.0, steps_left_ / 10.0}};
  }

  bool terminal() const override { return terminal_; }

 private:
  void spawn_round() {
    SplitMix64 rng(seed_stream(seed_, kSpawnTag, static_cast<std::uint64_t>(rounds_done_)));
    agent_col_ = static_cast<int>(rng.next_below(kWidth));
    // Target uniform over the six non-agent columns, so spawns are distinct.
    int t = static_cast<int>(rng.next_below(kWidth - 1));
    target_col_ = t < agent_col_ ? t : t + 1;
    steps_left_ = kRoundSteps;
  }

  std::uint64_t seed_ = 0;
  int agent_col_ = 0;
  int target_col_ = 0;
  int steps_left_ = 0;
  int rounds_done_ = 0;
  bool terminal_ = false;
};

}  // namespace

std::unique_ptr<Env> catch3_new(std::uint64_t seed) {
  return std::make_unique<Catch3Env>(seed);
}

std::unique_ptr<Env> aimfire5_new(std::uint64_t seed) {
  return std::make_unique<AimFire5Env>(seed);
}

std::unique_ptr<Env> make_env(const std::string& name, std::uint64_t seed) {
  if (name == "catch3") return catch3_new(seed);
  if (name == "aimfire5") return aimfire5_new(seed);
  throw ConfigError("unknown environment '" + name + "'");
}

const EnvDescriptor& env_descriptor(const std::string& name) {
  if (name == "catch3") {
    static const EnvDescriptor d = Catch3Env(0).descriptor();
    return d;
  }
  if (name == "aimfire5") {
    static const EnvDescriptor d = AimFire5Env(0).descriptor();
    return d;
  }
  throw ConfigError("unknown environment '" + name + "'");
}

}  // namespace cdrl
