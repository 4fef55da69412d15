#include "porogen/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace porogen::ad {

std::int64_t shape_size(const Shape& shape) {
  if (shape.empty()) throw std::invalid_argument("tensor shape is empty");
  std::int64_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("tensor extent must be positive");
    n *= d;
  }
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  auto n = shape_size(shape);
  return from(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::full(Shape shape, double fill, bool requires_grad) {
  auto n = shape_size(shape);
  return from(std::move(shape), std::vector<double>(n, fill), requires_grad);
}

Tensor Tensor::from(Shape shape, std::vector<double> values,
                    bool requires_grad) {
  auto n = shape_size(shape);
  if (static_cast<std::int64_t>(values.size()) != n)
    throw std::invalid_argument("tensor value count does not match shape " +
                                shape_str(shape));
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  if (requires_grad) node->grad.assign(node->value.size(), 0.0);
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(double v) { return from({1}, {v}); }

const Shape& Tensor::shape() const {
  if (!node_) throw std::logic_error("tensor is empty");
  return node_->shape;
}

std::int64_t Tensor::size() const {
  return static_cast<std::int64_t>(node_->value.size());
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

std::span<const double> Tensor::values() const {
  if (!node_) throw std::logic_error("tensor is empty");
  return node_->value;
}

std::span<double> Tensor::values_mut() {
  if (!node_) throw std::logic_error("tensor is empty");
  return node_->value;
}

std::span<const double> Tensor::grad() const {
  if (!node_ || !node_->requires_grad)
    throw std::logic_error("tensor has no gradient buffer");
  return node_->grad;
}

std::span<double> Tensor::grad_mut() {
  if (!node_ || !node_->requires_grad)
    throw std::logic_error("tensor has no gradient buffer");
  return node_->grad;
}

void Tensor::zero_grad() {
  if (!node_ || !node_->requires_grad)
    throw std::logic_error("tensor has no gradient buffer");
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

double Tensor::item() const {
  if (!node_ || node_->value.size() != 1)
    throw std::logic_error("item() requires a scalar tensor");
  return node_->value[0];
}

Tensor Tensor::detach() const {
  if (!node_) throw std::logic_error("tensor is empty");
  return from(node_->shape, node_->value, false);
}

Tensor make_op(Shape shape, std::vector<double> value,
               std::vector<Tensor> parents,
               std::function<void(detail::Node&)> backprop) {
  bool rg = false;
  for (const auto& p : parents) rg = rg || p.requires_grad();
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->requires_grad = rg;
  if (rg) {
    node->grad.assign(node->value.size(), 0.0);
    node->parents.reserve(parents.size());
    for (auto& p : parents) node->parents.push_back(p.handle());
    node->backprop = std::move(backprop);
  }
  return Tensor(std::move(node));
}

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                shape_str(a.shape()) + " vs " +
                                shape_str(b.shape()));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  std::vector<double> out(a.values().begin(), a.values().end());
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  detail::Node* pa = a.node();
  detail::Node* pb = b.node();
  return make_op(a.shape(), std::move(out), {a, b}, [pa, pb](detail::Node& n) {
    for (std::size_t i = 0; i < n.adjoint.size(); ++i) {
      pa->adjoint[i] += n.adjoint[i];
      pb->adjoint[i] += n.adjoint[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  std::vector<double> out(a.values().begin(), a.values().end());
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  detail::Node* pa = a.node();
  detail::Node* pb = b.node();
  return make_op(a.shape(), std::move(out), {a, b}, [pa, pb](detail::Node& n) {
    for (std::size_t i = 0; i < n.adjoint.size(); ++i) {
      pa->adjoint[i] += n.adjoint[i];
      pb->adjoint[i] -= n.adjoint[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  auto av = a.values();
  auto bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  detail::Node* pa = a.node();
  detail::Node* pb = b.node();
  return make_op(a.shape(), std::move(out), {a, b}, [pa, pb](detail::Node& n) {
    for (std::size_t i = 0; i < n.adjoint.size(); ++i) {
      pa->adjoint[i] += n.adjoint[i] * pb->value[i];
      pb->adjoint[i] += n.adjoint[i] * pa->value[i];
    }
  });
}

Tensor affine(const Tensor& x, double scale, double shift) {
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * xv[i] + shift;
  detail::Node* px = x.node();
  return make_op(x.shape(), std::move(out), {x}, [px, scale](detail::Node& n) {
    for (std::size_t i = 0; i < n.adjoint.size(); ++i)
      px->adjoint[i] += scale * n.adjoint[i];
  });
}

Tensor log(const Tensor& x) {
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(xv[i]);
  detail::Node* px = x.node();
  return make_op(x.shape(), std::move(out), {x}, [px](detail::Node& n) {
    for (std::size_t i = 0; i < n.adjoint.size(); ++i)
      px->adjoint[i] += n.adjoint[i] / px->value[i];
  });
}

Tensor clamp_min(const Tensor& x, double floor) {
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(xv[i], floor);
  detail::Node* px = x.node();
  return make_op(x.shape(), std::move(out), {x}, [px, floor](detail::Node& n) {
    for (std::size_t i = 0; i < n.adjoint.size(); ++i)
      if (px->value[i] > floor) px->adjoint[i] += n.adjoint[i];
  });
}

Tensor mean(const Tensor& x) {
  auto xv = x.values();
  double acc = 0.0;
  for (double v : xv) acc += v;
  const double inv_n = 1.0 / static_cast<double>(xv.size());
  detail::Node* px = x.node();
  return make_op({1}, {acc * inv_n}, {x}, [px, inv_n](detail::Node& n) {
    const double g = n.adjoint[0] * inv_n;
    for (auto& a : px->adjoint) a += g;
  });
}

Tensor mse(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mse");
  auto av = a.values();
  auto bv = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    acc += d * d;
  }
  const double inv_n = 1.0 / static_cast<double>(av.size());
  detail::Node* pa = a.node();
  detail::Node* pb = b.node();
  return make_op({1}, {acc * inv_n}, {a, b}, [pa, pb, inv_n](detail::Node& n) {
    const double g = 2.0 * n.adjoint[0] * inv_n;
    for (std::size_t i = 0; i < pa->value.size(); ++i) {
      const double d = g * (pa->value[i] - pb->value[i]);
      pa->adjoint[i] += d;
      pb->adjoint[i] -= d;
    }
  });
}

Tensor activation(const Tensor& x, Activation kind, double alpha) {
  auto xv = x.values();
  std::vector<double> out(xv.size());
  switch (kind) {
    case Activation::Relu:
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = xv[i] > 0.0 ? xv[i] : 0.0;
      break;
    case Activation::LeakyRelu:
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = xv[i] > 0.0 ? xv[i] : alpha * xv[i];
      break;
    case Activation::Tanh:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(xv[i]);
      break;
    case Activation::Sigmoid:
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = xv[i];
        out[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                          : std::exp(v) / (1.0 + std::exp(v));
      }
      break;
  }
  detail::Node* px = x.node();
  return make_op(x.shape(), std::move(out), {x},
                 [px, kind, alpha](detail::Node& n) {
                   switch (kind) {
                     case Activation::Relu:
                     case Activation::LeakyRelu: {
                       // slope 0 exactly at 0 for both rectifiers
                       const double neg =
                           kind == Activation::Relu ? 0.0 : alpha;
                       for (std::size_t i = 0; i < n.adjoint.size(); ++i) {
                         const double v = px->value[i];
                         if (v > 0.0)
                           px->adjoint[i] += n.adjoint[i];
                         else if (v < 0.0)
                           px->adjoint[i] += neg * n.adjoint[i];
                       }
                       break;
                     }
                     case Activation::Tanh:
                       for (std::size_t i = 0; i < n.adjoint.size(); ++i) {
                         const double y = n.value[i];
                         px->adjoint[i] += n.adjoint[i] * (1.0 - y * y);
                       }
                       break;
                     case Activation::Sigmoid:
                       for (std::size_t i = 0; i < n.adjoint.size(); ++i) {
                         const double y = n.value[i];
                         px->adjoint[i] += n.adjoint[i] * y * (1.0 - y);
                       }
                       break;
                   }
                 });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size())
    throw std::invalid_argument("reshape: element count mismatch " +
                                shape_str(x.shape()) + " -> " +
                                shape_str(shape));
  std::vector<double> out(x.values().begin(), x.values().end());
  detail::Node* px = x.node();
  return make_op(std::move(shape), std::move(out), {x},
                 [px](detail::Node& n) {
                   for (std::size_t i = 0; i < n.adjoint.size(); ++i)
                     px->adjoint[i] += n.adjoint[i];
                 });
}

Tensor concat(const Tensor& a, const Tensor& b, int axis) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.size() != sb.size() || axis < 0 ||
      axis >= static_cast<int>(sa.size()))
    throw std::invalid_argument("concat: rank/axis mismatch");
  for (std::size_t i = 0; i < sa.size(); ++i)
    if (static_cast<int>(i) != axis && sa[i] != sb[i])
      throw std::invalid_argument("concat: incompatible shapes " +
                                  shape_str(sa) + " vs " + shape_str(sb));
  Shape so = sa;
  so[axis] += sb[axis];

  std::int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= sa[i];
  for (std::size_t i = axis + 1; i < sa.size(); ++i) inner *= sa[i];
  const std::int64_t wa = sa[axis] * inner;
  const std::int64_t wb = sb[axis] * inner;

  std::vector<double> out(shape_size(so));
  auto av = a.values();
  auto bv = b.values();
  for (std::int64_t o = 0; o < outer; ++o) {
    std::copy_n(av.data() + o * wa, wa, out.data() + o * (wa + wb));
    std::copy_n(bv.data() + o * wb, wb, out.data() + o * (wa + wb) + wa);
  }
  detail::Node* pa = a.node();
  detail::Node* pb = b.node();
  return make_op(std::move(so), std::move(out), {a, b},
                 [pa, pb, outer, wa, wb](detail::Node& n) {
                   for (std::int64_t o = 0; o < outer; ++o) {
                     const double* g = n.adjoint.data() + o * (wa + wb);
                     double* ga = pa->adjoint.data() + o * wa;
                     double* gb = pb->adjoint.data() + o * wb;
                     for (std::int64_t i = 0; i < wa; ++i) ga[i] += g[i];
                     for (std::int64_t i = 0; i < wb; ++i) gb[i] += g[wa + i];
                   }
                 });
}

Tensor depth_plane(const Tensor& x, int index) {
  const Shape& s = x.shape();
  if (s.size() != 5)
    throw std::invalid_argument("depth_plane: expected a [N,C,D,H,W] tensor");
  const int nb = s[0], c = s[1], d = s[2], h = s[3], w = s[4];
  if (index < 0 || index >= d)
    throw std::invalid_argument("depth_plane: index out of range");
  const std::int64_t plane = static_cast<std::int64_t>(h) * w;
  std::vector<double> out(static_cast<std::size_t>(nb) * c * plane);
  auto xv = x.values();
  for (std::int64_t nc = 0; nc < static_cast<std::int64_t>(nb) * c; ++nc)
    std::copy_n(xv.data() + (nc * d + index) * plane, plane,
                out.data() + nc * plane);
  detail::Node* px = x.node();
  return make_op({nb, c, h, w}, std::move(out), {x},
                 [px, nb, c, d, index, plane](detail::Node& n) {
                   for (std::int64_t nc = 0;
                        nc < static_cast<std::int64_t>(nb) * c; ++nc) {
                     double* g = px->adjoint.data() + (nc * d + index) * plane;
                     const double* a = n.adjoint.data() + nc * plane;
                     for (std::int64_t i = 0; i < plane; ++i) g[i] += a[i];
                   }
                 });
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1)
    throw std::invalid_argument("backward: loss must be a scalar tensor");

  // Iterative post-order DFS over the parent DAG.
  std::vector<detail::Node*> topo;
  std::unordered_set<detail::Node*> visited;
  struct Frame {
    detail::Node* node;
    std::size_t next_parent;
  };
  std::vector<Frame> stack;
  stack.push_back({loss.node(), 0});
  visited.insert(loss.node());
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_parent < f.node->parents.size()) {
      detail::Node* p = f.node->parents[f.next_parent++].get();
      if (visited.insert(p).second) stack.push_back({p, 0});
    } else {
      topo.push_back(f.node);
      stack.pop_back();
    }
  }

  for (detail::Node* n : topo) n->adjoint.assign(n->value.size(), 0.0);
  loss.node()->adjoint[0] = 1.0;
  for (auto it = topo.rbegin(); it != topo.rend(); ++it)
    if ((*it)->backprop) (*it)->backprop(**it);
  for (detail::Node* n : topo) {
    if (n->requires_grad)
      for (std::size_t i = 0; i < n->grad.size(); ++i)
        n->grad[i] += n->adjoint[i];
    n->adjoint = std::vector<double>();
  }
}

}  // namespace porogen::ad
