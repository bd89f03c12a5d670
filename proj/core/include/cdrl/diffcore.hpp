#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace cdrl {

// All numerics run in 64-bit floats: gradient checks and reproducibility
// matter more than speed at this scale.
using Vec64 = std::vector<double>;

enum class Activation { kRelu, kIdentity };

// One affine stage mapping `rows` inputs to `cols` outputs, y = x^T W + b.
// Weights are stored row-major (row = input index), bias after the weights.
struct LayerShape {
  std::string name;
  int rows = 0;
  int cols = 0;
  bool has_bias = true;

  std::size_t size() const {
    return static_cast<std::size_t>(rows) * cols + (has_bias ? cols : 0);
  }
  bool operator==(const LayerShape&) const = default;
};

using ParamLayout = std::vector<LayerShape>;

std::size_t layout_size(const ParamLayout& layout);

// Flat parameter vector with a named-layer layout; the unit of
// synchronization and gradient application. The layout is fixed at
// construction; `data` length always equals layout_size(layout).
struct ParamSet {
  ParamLayout layout;
  Vec64 data;

  static ParamSet zeros(const ParamLayout& layout);

  std::size_t size() const { return data.size(); }
  bool empty() const { return layout.empty(); }

  // Offset of layer `i` within `data`.
  std::size_t layer_offset(std::size_t i) const;
  // Index into `layout` for a named layer; ShapeError when absent.
  std::size_t layer_index(std::string_view name) const;

  double* layer_data(std::size_t i) { return data.data() + layer_offset(i); }
  const double* layer_data(std::size_t i) const {
    return data.data() + layer_offset(i);
  }

  void check_finite(const char* what) const;
};

// Shapes must match exactly; throws ShapeError otherwise.
void axpy(ParamSet& dst, const ParamSet& src, double scale);
bool same_layout(const ParamLayout& a, const ParamLayout& b);

struct HiddenLayer {
  int width = 0;
  Activation activation = Activation::kRelu;
  bool operator==(const HiddenLayer&) const = default;
};

struct HeadSpec {
  std::string name;
  int width = 0;
  bool operator==(const HeadSpec&) const = default;
};

// Feed-forward network shape: a trunk of affine+activation stages shared by
// one or more named affine heads.
struct MlpSpec {
  int input_dim = 0;
  std::vector<HiddenLayer> hidden;
  std::vector<HeadSpec> heads;

  void validate() const;  // widths >= 1, at least one head
  // Width of the trunk output the heads read from.
  int trunk_dim() const;
  // Layers in order: hidden0..hiddenN-1, then one layer per head.
  ParamLayout layout() const;
  std::size_t head_index(std::string_view name) const;
  int head_width(std::string_view name) const;

  bool operator==(const MlpSpec&) const = default;
};

// Activation record from one forward pass; everything backward needs.
struct MlpTape {
  Vec64 input;
  std::vector<Vec64> pre;    // per hidden layer, pre-activation
  std::vector<Vec64> post;   // per hidden layer, post-activation
};

struct MlpOutputs {
  std::vector<Vec64> heads;  // in spec.heads order
  MlpTape tape;
};

struct MlpGradients {
  ParamSet params;
  Vec64 input;
};

MlpOutputs mlp_forward(const MlpSpec& spec, const ParamSet& params,
                       const Vec64& x);

// Gradient of any scalar loss whose gradient at the head outputs is
// `head_grads` (one vector per head, in spec order). Also returns dLoss/dx.
MlpGradients mlp_backward(const MlpSpec& spec, const ParamSet& params,
                          const MlpTape& tape,
                          const std::vector<Vec64>& head_grads);

// h(i) = exp(z(i)/tau) / sum_j exp(z(j)/tau), computed max-subtracted.
Vec64 softmax_tempered(const Vec64& z, double tau);

// out(i) = z(i) - max(z) - ln sum_j exp(z(j) - max(z)).
Vec64 log_softmax(const Vec64& z);

// Central-difference gradient estimate of a deterministic scalar function,
// (f(p + eps e_i) - f(p - eps e_i)) / (2 eps) per coordinate.
ParamSet finite_difference_grad(const std::function<double(const ParamSet&)>& f,
                                const ParamSet& params, double eps);

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero,
// drawn in layout order from a splitmix64 stream.
ParamSet init_mlp_params(const MlpSpec& spec, std::uint64_t seed);

}  // namespace cdrl
