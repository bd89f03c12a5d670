#include "cdrl/diffcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdrl/errors.hpp"
#include "cdrl/rng.hpp"

namespace cdrl {

std::size_t layout_size(const ParamLayout& layout) {
  std::size_t n = 0;
  for (const auto& layer : layout) n += layer.size();
  return n;
}

ParamSet ParamSet::zeros(const ParamLayout& layout) {
  ParamSet p;
  p.layout = layout;
  p.data.assign(layout_size(layout), 0.0);
  return p;
}

std::size_t ParamSet::layer_offset(std::size_t i) const {
  std::size_t off = 0;
  for (std::size_t k = 0; k < i; ++k) off += layout[k].size();
  return off;
}

std::size_t ParamSet::layer_index(std::string_view name) const {
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout[i].name == name) return i;
  }
  throw ShapeError("no layer named '" + std::string(name) + "'");
}

void ParamSet::check_finite(const char* what) const {
  for (double v : data) {
    if (!std::isfinite(v)) {
      throw ParameterError(std::string(what) + ": non-finite entry");
    }
  }
}

bool same_layout(const ParamLayout& a, const ParamLayout& b) { return a == b; }

void axpy(ParamSet& dst, const ParamSet& src, double scale) {
  if (!same_layout(dst.layout, src.layout)) {
    throw ShapeError("axpy: layouts differ");
  }
  for (std::size_t i = 0; i < dst.data.size(); ++i) {
    dst.data[i] += scale * src.data[i];
  }
}

void MlpSpec::validate() const {
  if (input_dim < 1) throw ShapeError("MlpSpec: input_dim must be >= 1");
  for (const auto& h : hidden) {
    if (h.width < 1) throw ShapeError("MlpSpec: hidden width must be >= 1");
  }
  if (heads.empty()) throw ShapeError("MlpSpec: at least one head required");
  for (const auto& h : heads) {
    if (h.width < 1) throw ShapeError("MlpSpec: head width must be >= 1");
  }
}

int MlpSpec::trunk_dim() const {
  return hidden.empty() ? input_dim : hidden.back().width;
}

ParamLayout MlpSpec::layout() const {
  ParamLayout layout;
  int prev = input_dim;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    layout.push_back({"hidden" + std::to_string(i), prev, hidden[i].width, true});
    prev = hidden[i].width;
  }
  for (const auto& head : heads) {
    layout.push_back({head.name, prev, head.width, true});
  }
  return layout;
}

std::size_t MlpSpec::head_index(std::string_view name) const {
  for (std::size_t i = 0; i < heads.size(); ++i) {
    if (heads[i].name == name) return i;
  }
  throw ShapeError("no head named '" + std::string(name) + "'");
}

int MlpSpec::head_width(std::string_view name) const {
  return heads[head_index(name)].width;
}

namespace {

// y = x^T W + b for one layer; W row-major with `rows` input rows.
void affine_forward(const LayerShape& shape, const double* w, const Vec64& x,
                    Vec64& y) {
  const double* bias = w + static_cast<std::size_t>(shape.rows) * shape.cols;
  if (shape.has_bias) {
    y.assign(bias, bias + shape.cols);
  } else {
    y.assign(shape.cols, 0.0);
  }
  for (int i = 0; i < shape.rows; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    if (xi == 0.0) continue;
    const double* row = w + static_cast<std::size_t>(i) * shape.cols;
    for (int j = 0; j < shape.cols; ++j) y[static_cast<std::size_t>(j)] += xi * row[j];
  }
}

// Accumulates dW, db into gw and dL/dx into dx given dL/dy.
void affine_backward(const LayerShape& shape, const double* w, const Vec64& x,
                     const Vec64& dy, double* gw, Vec64* dx) {
  double* gbias = gw + static_cast<std::size_t>(shape.rows) * shape.cols;
  if (shape.has_bias) {
    for (int j = 0; j < shape.cols; ++j) gbias[j] += dy[static_cast<std::size_t>(j)];
  }
  for (int i = 0; i < shape.rows; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    const double* wrow = w + static_cast<std::size_t>(i) * shape.cols;
    double* grow = gw + static_cast<std::size_t>(i) * shape.cols;
    double acc = 0.0;
    for (int j = 0; j < shape.cols; ++j) {
      const double d = dy[static_cast<std::size_t>(j)];
      grow[j] += xi * d;
      acc += wrow[j] * d;
    }
    if (dx) (*dx)[static_cast<std::size_t>(i)] = acc;
  }
}

void apply_activation(Activation act, const Vec64& pre, Vec64& post) {
  post = pre;
  if (act == Activation::kRelu) {
    for (double& v : post) v = v > 0.0 ? v : 0.0;
  }
}

}  // namespace

MlpOutputs mlp_forward(const MlpSpec& spec, const ParamSet& params,
                       const Vec64& x) {
  if (static_cast<int>(x.size()) != spec.input_dim) {
    throw ShapeError("mlp_forward: input length " + std::to_string(x.size()) +
                     " != input_dim " + std::to_string(spec.input_dim));
  }
  if (!same_layout(params.layout, spec.layout())) {
    throw ShapeError("mlp_forward: params layout does not match spec");
  }

  MlpOutputs out;
  out.tape.input = x;
  const Vec64* cur = &out.tape.input;
  std::size_t layer = 0;
  for (std::size_t l = 0; l < spec.hidden.size(); ++l, ++layer) {
    Vec64 pre;
    affine_forward(params.layout[layer], params.layer_data(layer), *cur, pre);
    Vec64 post;
    apply_activation(spec.hidden[l].activation, pre, post);
    out.tape.pre.push_back(std::move(pre));
    out.tape.post.push_back(std::move(post));
    cur = &out.tape.post.back();
  }
  out.heads.resize(spec.heads.size());
  for (std::size_t h = 0; h < spec.heads.size(); ++h, ++layer) {
    affine_forward(params.layout[layer], params.layer_data(layer), *cur,
                   out.heads[h]);
    for (double v : out.heads[h]) {
      if (!std::isfinite(v)) throw ParameterError("mlp_forward: non-finite head output");
    }
  }
  return out;
}

MlpGradients mlp_backward(const MlpSpec& spec, const ParamSet& params,
                          const MlpTape& tape,
                          const std::vector<Vec64>& head_grads) {
  if (head_grads.size() != spec.heads.size()) {
    throw ShapeError("mlp_backward: expected " +
                     std::to_string(spec.heads.size()) + " head gradients");
  }
  for (std::size_t h = 0; h < head_grads.size(); ++h) {
    if (static_cast<int>(head_grads[h].size()) != spec.heads[h].width) {
      throw ShapeError("mlp_backward: head '" + spec.heads[h].name +
                       "' gradient has wrong length");
    }
  }
  if (!same_layout(params.layout, spec.layout())) {
    throw ShapeError("mlp_backward: params layout does not match spec");
  }
  if (static_cast<int>(tape.input.size()) != spec.input_dim ||
      tape.pre.size() != spec.hidden.size()) {
    throw ShapeError("mlp_backward: tape does not match spec");
  }

  MlpGradients g;
  g.params = ParamSet::zeros(params.layout);

  const std::size_t n_hidden = spec.hidden.size();
  const Vec64& trunk_out = n_hidden ? tape.post.back() : tape.input;

  Vec64 d_trunk(trunk_out.size(), 0.0);
  for (std::size_t h = 0; h < spec.heads.size(); ++h) {
    const std::size_t layer = n_hidden + h;
    Vec64 d_in(trunk_out.size(), 0.0);
    affine_backward(params.layout[layer], params.layer_data(layer), trunk_out,
                    head_grads[h], g.params.layer_data(layer), &d_in);
    for (std::size_t i = 0; i < d_trunk.size(); ++i) d_trunk[i] += d_in[i];
  }

  Vec64 d_post = std::move(d_trunk);
  for (std::size_t l = n_hidden; l-- > 0;) {
    Vec64 d_pre = d_post;
    if (spec.hidden[l].activation == Activation::kRelu) {
      for (std::size_t i = 0; i < d_pre.size(); ++i) {
        if (tape.pre[l][i] <= 0.0) d_pre[i] = 0.0;
      }
    }
    const Vec64& layer_in = l == 0 ? tape.input : tape.post[l - 1];
    Vec64 d_in(layer_in.size(), 0.0);
    affine_backward(params.layout[l], params.layer_data(l), layer_in, d_pre,
                    g.params.layer_data(l), &d_in);
    d_post = std::move(d_in);
  }
  // With no hidden layers the heads hang off the input and d_post already
  // holds dL/dx.
  g.input = std::move(d_post);
  return g;
}

Vec64 softmax_tempered(const Vec64& z, double tau) {
  if (z.empty()) throw ShapeError("softmax_tempered: empty logits");
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ParameterError("softmax_tempered: tau must be positive");
  }
  for (double v : z) {
    if (!std::isfinite(v)) throw ParameterError("softmax_tempered: non-finite logit");
  }
  const double m = *std::max_element(z.begin(), z.end());
  Vec64 h(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    h[i] = std::exp((z[i] - m) / tau);
    sum += h[i];
  }
  for (double& v : h) v /= sum;
  return h;
}

Vec64 log_softmax(const Vec64& z) {
  if (z.empty()) throw ShapeError("log_softmax: empty logits");
  for (double v : z) {
    if (!std::isfinite(v)) throw ParameterError("log_softmax: non-finite logit");
  }
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - m);
  const double lse = std::log(sum);
  Vec64 out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - m - lse;
  return out;
}

ParamSet finite_difference_grad(
    const std::function<double(const ParamSet&)>& f, const ParamSet& params,
    double eps) {
  if (!(eps > 0.0)) throw ParameterError("finite_difference_grad: eps must be > 0");
  ParamSet grad = ParamSet::zeros(params.layout);
  ParamSet probe = params;
  for (std::size_t i = 0; i < params.data.size(); ++i) {
    const double orig = params.data[i];
    probe.data[i] = orig + eps;
    const double hi = f(probe);
    probe.data[i] = orig - eps;
    const double lo = f(probe);
    probe.data[i] = orig;
    grad.data[i] = (hi - lo) / (2.0 * eps);
  }
  return grad;
}

ParamSet init_mlp_params(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  ParamSet p = ParamSet::zeros(spec.layout());
  SplitMix64 rng(seed);
  for (std::size_t l = 0; l < p.layout.size(); ++l) {
    const LayerShape& shape = p.layout[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(shape.rows));
    double* w = p.layer_data(l);
    const std::size_t n_weights = static_cast<std::size_t>(shape.rows) * shape.cols;
    for (std::size_t i = 0; i < n_weights; ++i) {
      w[i] = rng.next_uniform(-bound, bound);
    }
    // biases stay zero
  }
  return p;
}

}  // namespace cdrl
