#include <doctest.h>

#include <cmath>

#include "cdrl/agentnet.hpp"
#include "cdrl/envsuite.hpp"
#include "cdrl/errors.hpp"
#include "cdrl/rng.hpp"
#include "test_helpers.hpp"

using namespace cdrl;
using namespace cdrl::testing;

namespace {

Observation random_obs(SplitMix64& rng) {
  return {random_vec(rng, 3, 0.0, 1.0)};
}

}  // namespace

TEST_CASE("student heads are wired to the environment's action space") {
  const StudentNetwork net = make_student(env_descriptor("aimfire5"), {8, 8}, 1);
  CHECK(net.action_dim == 5);
  CHECK(net.spec.head_width("policy") == 5);
  CHECK(net.spec.head_width("distill") == 5);
  CHECK(net.spec.head_width("value") == 1);

  const TeacherNetwork teacher = make_teacher(env_descriptor("catch3"), {8, 8}, 1);
  CHECK(teacher.env.action_dim == 3);
  CHECK(teacher.spec.head_width("policy") == 3);
}

TEST_CASE("zero parameters give a uniform policy and zero value") {
  StudentNetwork net = make_student(env_descriptor("catch3"), {16, 16}, 3);
  net.params = ParamSet::zeros(net.spec.layout());
  const PolicyOutput out = student_forward(net, {{0.4, 0.1, 0.9}});
  const Vec64 probs = softmax_tempered(out.policy_logits, 1.0);
  for (double p : probs) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(out.value == 0.0);
}

TEST_CASE("student_forward is deterministic and matches the naive oracle") {
  SplitMix64 rng(21);
  const StudentNetwork net = make_student(env_descriptor("catch3"), {7, 5}, 77);
  for (int it = 0; it < 20; ++it) {
    const Observation obs = random_obs(rng);
    const PolicyOutput a = student_forward(net, obs);
    const PolicyOutput b = student_forward(net, obs);
    CHECK(a.policy_logits == b.policy_logits);
    CHECK(a.distill_logits == b.distill_logits);
    CHECK(a.value == b.value);

    const auto heads = naive_mlp_forward(net.spec, net.params.data, obs.features);
    CHECK(max_rel_err(a.policy_logits, heads[0]) < 1e-12);
    CHECK(max_rel_err(a.distill_logits, heads[1]) < 1e-12);
    CHECK(a.value == doctest::Approx(heads[2][0]).epsilon(1e-12));
  }
}

TEST_CASE("policy probabilities always form a distribution") {
  SplitMix64 rng(22);
  const StudentNetwork net = make_student(env_descriptor("aimfire5"), {32, 32}, 5);
  for (int it = 0; it < 100; ++it) {
    const PolicyOutput out = student_forward(net, random_obs(rng));
    const Vec64 probs = softmax_tempered(out.policy_logits, 1.0);
    double sum = 0.0;
    for (double p : probs) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("teacher_forward never mutates teacher parameters") {
  const TeacherNetwork teacher = make_teacher(env_descriptor("catch3"), {8}, 9);
  const Vec64 before = teacher.params.data;
  SplitMix64 rng(23);
  for (int it = 0; it < 50; ++it) teacher_forward(teacher, random_obs(rng));
  CHECK(teacher.params.data == before);
}

TEST_CASE("sample_action: dominant logit always wins") {
  SplitMix64 rng(24);
  for (int it = 0; it < 1000; ++it) {
    CHECK(sample_action({1000.0, -1000.0, -1000.0}, rng) == 0);
  }
}

TEST_CASE("sample_action: uniform logits give near-uniform frequencies") {
  // Binomial bound: |freq - 1/d| < 3 sigma with sigma = sqrt(p(1-p)/n).
  for (std::size_t d : {2u, 3u, 5u}) {
    SplitMix64 rng(25);
    const Vec64 logits(d, 0.7);
    std::vector<int> counts(d, 0);
    const int n = 10000;
    for (int it = 0; it < n; ++it) {
      counts[static_cast<std::size_t>(sample_action(logits, rng))] += 1;
    }
    const double p = 1.0 / static_cast<double>(d);
    const double sigma = std::sqrt(p * (1 - p) / n);
    for (int c : counts) {
      CHECK(std::abs(static_cast<double>(c) / n - p) < 3 * sigma);
    }
  }
}

TEST_CASE("sample_action is reproducible for a fixed seed") {
  const Vec64 logits = {0.3, -0.2, 0.9, 0.1};
  std::vector<int> a, b;
  SplitMix64 r1(77), r2(77);
  for (int it = 0; it < 200; ++it) {
    a.push_back(sample_action(logits, r1));
    b.push_back(sample_action(logits, r2));
  }
  CHECK(a == b);
}

TEST_CASE("greedy_action: ties to lowest index, shift invariant") {
  CHECK(greedy_action({0, 0, 0}) == 0);
  CHECK(greedy_action({1, 3, 2}) == 1);
  CHECK(greedy_action({2, 3, 3}) == 1);
  SplitMix64 rng(26);
  for (int it = 0; it < 100; ++it) {
    const Vec64 z = random_vec(rng, 2 + rng.next_below(5));
    Vec64 shifted = z;
    const double c = rng.next_uniform(-20.0, 20.0);
    for (double& v : shifted) v += c;
    CHECK(greedy_action(z) == greedy_action(shifted));
  }
}

TEST_CASE("distill-head perturbations never change action selection") {
  SplitMix64 rng(27);
  StudentNetwork net = make_student(env_descriptor("aimfire5"), {16, 16}, 4);
  StudentNetwork poked = net;
  const std::size_t layer = poked.params.layer_index("distill");
  const std::size_t off = poked.params.layer_offset(layer);
  for (std::size_t i = off; i < off + poked.params.layout[layer].size(); ++i) {
    poked.params.data[i] += rng.next_uniform(-5.0, 5.0);
  }

  for (int it = 0; it < 200; ++it) {
    const Observation obs = random_obs(rng);
    const PolicyOutput a = student_forward(net, obs);
    const PolicyOutput b = student_forward(poked, obs);
    CHECK(a.policy_logits == b.policy_logits);
    CHECK(greedy_action(a.policy_logits) == greedy_action(b.policy_logits));
    SplitMix64 s1(it), s2(it);
    CHECK(sample_action(a.policy_logits, s1) == sample_action(b.policy_logits, s2));
    CHECK(a.distill_logits != b.distill_logits);
  }
}
