#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace porogen::ad {

using Shape = std::vector<int>;

std::int64_t shape_size(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;     // persistent, allocated iff requires_grad
  std::vector<double> adjoint;  // scratch, valid only inside backward()
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;  // pushes adjoint into parents
};

}  // namespace detail

// Dense n-d double tensor participating in reverse-mode differentiation.
// Value semantics are shared-handle: copies alias the same node, which is
// what lets a built graph refer back to its inputs.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double fill, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values,
                     bool requires_grad = false);
  static Tensor scalar(double v);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::int64_t size() const;
  bool requires_grad() const;

  std::span<const double> values() const;
  // Mutable view of the raw values; meant for leaf tensors (parameters,
  // probes). Mutating an interior node between forward and backward is
  // undefined.
  std::span<double> values_mut();

  std::span<const double> grad() const;  // throws unless requires_grad
  std::span<double> grad_mut();
  void zero_grad();

  double item() const;     // scalar tensors only
  Tensor detach() const;   // value copy, no gradient, no history

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& handle() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<detail::Node> node_;

  friend Tensor make_op(Shape shape, std::vector<double> value,
                        std::vector<Tensor> parents,
                        std::function<void(detail::Node&)> backprop);
};

// Builds an op result node. The backprop callback reads the node's adjoint
// and accumulates into the parents' adjoints; it is dropped (and the
// parents are not retained) when no parent requires gradients.
Tensor make_op(Shape shape, std::vector<double> value,
               std::vector<Tensor> parents,
               std::function<void(detail::Node&)> backprop);

// Elementwise / reduction ops.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor affine(const Tensor& x, double scale, double shift);
Tensor log(const Tensor& x);
Tensor clamp_min(const Tensor& x, double floor);
Tensor mean(const Tensor& x);
Tensor mse(const Tensor& a, const Tensor& b);

enum class Activation { Relu, LeakyRelu, Tanh, Sigmoid };
Tensor activation(const Tensor& x, Activation kind, double alpha = 0.0);

// Shape ops.
Tensor reshape(const Tensor& x, Shape shape);
Tensor concat(const Tensor& a, const Tensor& b, int axis);
// Selects plane `index` along the depth axis of a [N,C,D,H,W] tensor;
// gradients flow only through that plane.
Tensor depth_plane(const Tensor& x, int index);

// Reverse-mode sweep from a scalar loss. Each call accumulates d(loss)/dt
// into the persistent grad buffer of every reachable requires_grad tensor;
// buffers keep adding up until zero_grad().
void backward(const Tensor& loss);

}  // namespace porogen::ad
