#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cdrl/agentnet.hpp"
#include "cdrl/diffcore.hpp"
#include "cdrl/envsuite.hpp"

namespace cdrl {

// Trainable map from teacher-logit space (dim d_alpha) to the student's
// action space (dim d_beta). Default shape: four ReLU layers of width 32
// feeding one affine output head.
struct AlignmentNetwork {
  MlpSpec spec;
  ParamSet params;
  int input_dim = 0;
  int output_dim = 0;
};

// A teacher/student logit pair computed from the identical observation of
// the target environment.
struct AlignmentPair {
  Vec64 teacher_logits;
  Vec64 student_logits;
};

using AlignmentDataset = std::vector<AlignmentPair>;

AlignmentNetwork make_alignment_network(
    int teacher_dim, int student_dim, std::uint64_t seed,
    const std::vector<int>& hidden = {32, 32, 32, 32});

Vec64 align_forward(const AlignmentNetwork& net, const Vec64& teacher_logits);

// One SGD step on sum_t KL(softmax(student_t/tau) || softmax(F(teacher_t))):
// the tempered student/expert distribution is the fixed target, gradients
// flow only into the alignment parameters. Returns the pre-update batch loss.
double align_train_step(AlignmentNetwork& net,
                        std::span<const AlignmentPair> batch, double tau,
                        double lr);

struct OfflineAlignConfig {
  int collect_states = 8192;   // states visited by rolling the expert policy
  int batch_size = 64;
  double lr = 0.01;
  double tau = 1.0;
  std::uint64_t seed = 1;
  // Stop when the full-dataset loss improves by less than this relative
  // amount over a 1000-step window.
  double min_rel_improvement = 1e-4;
  int window = 1000;
};

// Offline protocol: roll the expert's policy in the target environment,
// collect paired logits on the visited states, then fit the alignment
// network until the convergence criterion or the step budget `steps`.
AlignmentNetwork offline_train_alignment(const TeacherNetwork& teacher,
                                         const TeacherNetwork& expert,
                                         Env& env, int steps,
                                         const OfflineAlignConfig& cfg);

// Identity baseline for heterogeneous spaces: copy the first min(d, in)
// entries and zero-fill the rest.
Vec64 pad_or_truncate(const Vec64& logits, int dim);

}  // namespace cdrl
