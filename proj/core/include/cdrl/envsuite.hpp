#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cdrl/diffcore.hpp"

namespace cdrl {

// Fixed-length feature vector, every entry normalized to [0, 1].
struct Observation {
  Vec64 features;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool terminal = false;
};

struct EnvDescriptor {
  std::string name;
  int action_dim = 0;
  int obs_dim = 0;
  int max_episode_steps = 0;
  // Documented semantics per action index. The two built-in games permute
  // these deliberately: index 1 is "left" in catch3 but "right" in aimfire5.
  std::vector<std::string> action_labels;
};

// Episodic, seeded, single-owner environment. Handles may move between
// workers but are never shared concurrently.
class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvDescriptor& descriptor() const = 0;
  // Re-initializes the episode from `seed`; round counter and state cleared.
  virtual Observation reset(std::uint64_t seed) = 0;
  // Advances one step. Rejects out-of-range actions (ParameterError) and
  // stepping a finished episode (StateError).
  virtual StepResult step(int action) = 0;
  virtual Observation observation() const = 0;
  virtual bool terminal() const = 0;
};

// Catch-3: 7x7 grid, 8 drops per episode. A ball falls one row per step from
// a seeded-random top column; actions {0:stay, 1:left, 2:right} move the
// paddle along the bottom row with wall clamping. A drop ends when the ball
// reaches the bottom row: +1 if caught, -1 otherwise; other steps reward 0.
// Observation: [ball_col/6, ball_row/6, paddle_col/6].
std::unique_ptr<Env> catch3_new(std::uint64_t seed);

// AimFire-5: width-7 track, 8 rounds per episode. Agent and a stationary
// target spawn at seeded-random distinct columns. Actions
// {0:fire, 1:right, 2:stay, 3:left, 4:long-fire}; fire ends the round with
// +1 iff aligned, long-fire with +1 iff within one column, moves reward 0.
// A round times out with -1 after 10 steps without firing.
// Observation: [agent_col/6, target_col/6, steps_left_in_round/10].
std::unique_ptr<Env> aimfire5_new(std::uint64_t seed);

// Accepts the names "catch3" and "aimfire5"; ConfigError otherwise.
std::unique_ptr<Env> make_env(const std::string& name, std::uint64_t seed);
const EnvDescriptor& env_descriptor(const std::string& name);

}  // namespace cdrl
