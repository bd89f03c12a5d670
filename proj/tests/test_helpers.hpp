#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "cdrl/diffcore.hpp"
#include "cdrl/rng.hpp"

namespace cdrl::testing {

inline Vec64 random_vec(SplitMix64& rng, std::size_t n, double lo = -2.0,
                        double hi = 2.0) {
  Vec64 v(n);
  for (double& x : v) x = rng.next_uniform(lo, hi);
  return v;
}

inline ParamSet random_params(SplitMix64& rng, const ParamLayout& layout,
                              double lo = -1.0, double hi = 1.0) {
  ParamSet p = ParamSet::zeros(layout);
  for (double& x : p.data) x = rng.next_uniform(lo, hi);
  return p;
}

// Relative error with a unit floor, the convention gradient-check harnesses
// use: |a-b| / max(1, |a|, |b|).
inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline double max_rel_err(const Vec64& a, const Vec64& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, rel_err(a[i], b[i]));
  }
  return worst;
}

// Independent straight-line re-implementation of the MLP forward pass used
// as a re-evaluation oracle. Indexes the flat parameter vector directly and
// shares no code with mlp_forward.
inline std::vector<Vec64> naive_mlp_forward(const MlpSpec& spec,
                                            const Vec64& flat,
                                            const Vec64& x) {
  std::size_t off = 0;
  Vec64 act = x;
  int in_dim = spec.input_dim;
  for (const auto& hl : spec.hidden) {
    Vec64 next(static_cast<std::size_t>(hl.width), 0.0);
    for (int i = 0; i < in_dim; ++i) {
      for (int j = 0; j < hl.width; ++j) {
        next[static_cast<std::size_t>(j)] +=
            act[static_cast<std::size_t>(i)] *
            flat[off + static_cast<std::size_t>(i) * hl.width +
                 static_cast<std::size_t>(j)];
      }
    }
    off += static_cast<std::size_t>(in_dim) * hl.width;
    for (int j = 0; j < hl.width; ++j) {
      next[static_cast<std::size_t>(j)] += flat[off + static_cast<std::size_t>(j)];
    }
    off += static_cast<std::size_t>(hl.width);
    if (hl.activation == Activation::kRelu) {
      for (double& v : next) v = std::max(0.0, v);
    }
    act = std::move(next);
    in_dim = hl.width;
  }
  std::vector<Vec64> heads;
  for (const auto& head : spec.heads) {
    Vec64 out(static_cast<std::size_t>(head.width), 0.0);
    for (int i = 0; i < in_dim; ++i) {
      for (int j = 0; j < head.width; ++j) {
        out[static_cast<std::size_t>(j)] +=
            act[static_cast<std::size_t>(i)] *
            flat[off + static_cast<std::size_t>(i) * head.width +
                 static_cast<std::size_t>(j)];
      }
    }
    off += static_cast<std::size_t>(in_dim) * head.width;
    for (int j = 0; j < head.width; ++j) {
      out[static_cast<std::size_t>(j)] += flat[off + static_cast<std::size_t>(j)];
    }
    off += static_cast<std::size_t>(head.width);
    heads.push_back(std::move(out));
  }
  return heads;
}

// Hand-wired optimal Catch-3 policy as a teacher-shaped network: two ReLU
// units detect which side of the ball the paddle is on, the policy head
// turns that into stay/left/right with wide logit margins. Greedy play
// scores +8 on every episode.
inline std::pair<MlpSpec, ParamSet> optimal_catch3_net() {
  MlpSpec spec;
  spec.input_dim = 3;
  spec.hidden = {{2, Activation::kRelu}};
  spec.heads = {{"policy", 3}, {"value", 1}};
  ParamSet p = ParamSet::zeros(spec.layout());
  // hidden: h0 = relu(ball - paddle), h1 = relu(paddle - ball)
  double* w0 = p.layer_data(0);
  w0[0 * 2 + 0] = 1.0;
  w0[2 * 2 + 0] = -1.0;
  w0[0 * 2 + 1] = -1.0;
  w0[2 * 2 + 1] = 1.0;
  // policy: stay gets a +5 bias, movement logits 60*h beat it off-center
  double* wp = p.layer_data(1);
  wp[0 * 3 + 2] = 60.0;  // h0 -> right
  wp[1 * 3 + 1] = 60.0;  // h1 -> left
  wp[2 * 3 + 0] = 5.0;   // stay bias
  return {spec, std::move(p)};
}

// Same construction for AimFire-5: walk toward the target, fire on top of
// it. Note the permuted indices {0:fire, 1:right, 2:stay, 3:left, 4:long}.
inline std::pair<MlpSpec, ParamSet> optimal_aimfire5_net() {
  MlpSpec spec;
  spec.input_dim = 3;
  spec.hidden = {{2, Activation::kRelu}};
  spec.heads = {{"policy", 5}, {"value", 1}};
  ParamSet p = ParamSet::zeros(spec.layout());
  // hidden: h0 = relu(target - agent), h1 = relu(agent - target)
  double* w0 = p.layer_data(0);
  w0[1 * 2 + 0] = 1.0;
  w0[0 * 2 + 0] = -1.0;
  w0[0 * 2 + 1] = 1.0;
  w0[1 * 2 + 1] = -1.0;
  double* wp = p.layer_data(1);
  wp[0 * 5 + 1] = 60.0;  // h0 -> right
  wp[1 * 5 + 3] = 60.0;  // h1 -> left
  wp[2 * 5 + 0] = 5.0;   // fire bias
  return {spec, std::move(p)};
}

}  // namespace cdrl::testing
