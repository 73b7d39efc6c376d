#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

// Dense tensors with reverse-mode automatic differentiation. The graph is
// recorded implicitly: every op returns a fresh node holding shared pointers
// to its inputs and a closure that pushes this node's gradient into them.
// All storage is double precision; any non-finite value is a hard error.

namespace deltamine::nn {

using Shape = std::vector<std::size_t>;

namespace detail {
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // sized lazily, empty means all-zero
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;  // reads this->grad, accumulates into parents

  std::size_t size() const { return value.size(); }
  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }

  // iterative teardown: recurrent graphs form parent chains as long as the
  // input sequence, deep enough to overflow the stack under the default
  // recursive shared_ptr destruction
  ~Node() {
    std::vector<std::shared_ptr<Node>> pending;
    pending.swap(parents);
    while (!pending.empty()) {
      std::shared_ptr<Node> n = std::move(pending.back());
      pending.pop_back();
      if (n && n.use_count() == 1) {
        for (auto& p : n->parents) pending.push_back(std::move(p));
        n->parents.clear();
      }
    }
  }
};
}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor constant(Shape shape, std::vector<double> data);
  static Tensor parameter(Shape shape, std::vector<double> data);
  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t size() const { return node_->value.size(); }
  std::size_t rank() const { return node_->shape.size(); }
  bool requires_grad() const { return node_->requires_grad; }

  const std::vector<double>& values() const { return node_->value; }
  std::vector<double>& values() { return node_->value; }
  double item() const;  // value of a single-element tensor

  // Gradient of the last backward() pass; zeros if the tensor is
  // disconnected from the loss.
  std::vector<double> grad() const;
  void zero_grad() { node_->grad.clear(); }

  detail::Node* node() const { return node_.get(); }
  std::shared_ptr<detail::Node> shared_node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<detail::Node> node_;

  friend Tensor make_op(Shape shape, std::vector<double> value,
                        std::vector<Tensor> inputs,
                        std::function<void(detail::Node&)> backprop);
};

// Elementwise ops require identical shapes; no broadcasting.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);

// m: [r, c] row-major, v: [c] -> [r]
Tensor matvec(const Tensor& m, const Tensor& v);
// i-th row of a [r, c] matrix as a [c] vector; backward scatters into the row
Tensor row(const Tensor& m, std::size_t i);
Tensor concat(const Tensor& a, const Tensor& b);
Tensor sum(const Tensor& a);
// dot(a, b) == sum(mul(a, b)), provided as a composite
Tensor dot(const Tensor& a, const Tensor& b);
// vector scaled by a single-element tensor
Tensor smul(const Tensor& v, const Tensor& s);

// Weighted binary cross entropy -(w*y*log p + (1-y)*log(1-p)) on a scalar
// probability; p is clamped to [1e-7, 1-1e-7] before the logs.
Tensor binary_cross_entropy(const Tensor& p, double label, double pos_weight);

// Reverse-mode accumulation from a scalar loss into every requires_grad
// tensor reachable through the recorded graph.
void backward(const Tensor& loss);

}  // namespace deltamine::nn
