#include "deltamine/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace deltamine::nn {

namespace {

std::size_t shape_size(const Shape& s) {
  std::size_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

void check_finite(const std::vector<double>& v, const char* op) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::runtime_error(std::string("non-finite value produced by ") + op);
    }
  }
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

}  // namespace

Tensor make_op(Shape shape, std::vector<double> value, std::vector<Tensor> inputs,
               std::function<void(detail::Node&)> backprop) {
  auto n = std::make_shared<detail::Node>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  for (const auto& in : inputs) {
    n->requires_grad = n->requires_grad || in.requires_grad();
    n->parents.push_back(in.shared_node());
  }
  if (n->requires_grad) n->backprop = std::move(backprop);
  return Tensor(std::move(n));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  auto n = std::make_shared<detail::Node>();
  n->value.assign(shape_size(shape), 0.0);
  n->shape = std::move(shape);
  n->requires_grad = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::constant(Shape shape, std::vector<double> data) {
  if (shape_size(shape) != data.size()) {
    throw std::invalid_argument("constant: data length does not match shape");
  }
  check_finite(data, "constant");
  auto n = std::make_shared<detail::Node>();
  n->shape = std::move(shape);
  n->value = std::move(data);
  return Tensor(std::move(n));
}

Tensor Tensor::parameter(Shape shape, std::vector<double> data) {
  Tensor t = constant(std::move(shape), std::move(data));
  t.node_->requires_grad = true;
  return t;
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  if (!std::isfinite(v)) throw std::invalid_argument("scalar: non-finite");
  auto n = std::make_shared<detail::Node>();
  n->shape = {1};
  n->value = {v};
  n->requires_grad = requires_grad;
  return Tensor(std::move(n));
}

double Tensor::item() const {
  if (size() != 1) throw std::invalid_argument("item: tensor is not a scalar");
  return node_->value[0];
}

std::vector<double> Tensor::grad() const {
  if (node_->grad.empty()) return std::vector<double>(size(), 0.0);
  return node_->grad;
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
  check_finite(out, "add");
  return make_op(a.shape(), std::move(out), {a, b}, [](detail::Node& n) {
    for (auto& p : n.parents) {
      if (!p->requires_grad) continue;
      p->ensure_grad();
      for (std::size_t i = 0; i < n.grad.size(); ++i) p->grad[i] += n.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] - b.values()[i];
  check_finite(out, "sub");
  return make_op(a.shape(), std::move(out), {a, b}, [](detail::Node& n) {
    auto& pa = n.parents[0];
    auto& pb = n.parents[1];
    if (pa->requires_grad) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < n.grad.size(); ++i) pa->grad[i] += n.grad[i];
    }
    if (pb->requires_grad) {
      pb->ensure_grad();
      for (std::size_t i = 0; i < n.grad.size(); ++i) pb->grad[i] -= n.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * b.values()[i];
  check_finite(out, "mul");
  return make_op(a.shape(), std::move(out), {a, b}, [](detail::Node& n) {
    auto& pa = n.parents[0];
    auto& pb = n.parents[1];
    if (pa->requires_grad) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < n.grad.size(); ++i) pa->grad[i] += n.grad[i] * pb->value[i];
    }
    if (pb->requires_grad) {
      pb->ensure_grad();
      for (std::size_t i = 0; i < n.grad.size(); ++i) pb->grad[i] += n.grad[i] * pa->value[i];
    }
  });
}

Tensor scale(const Tensor& a, double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("scale: non-finite factor");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * c;
  check_finite(out, "scale");
  return make_op(a.shape(), std::move(out), {a}, [c](detail::Node& n) {
    auto& p = n.parents[0];
    if (!p->requires_grad) return;
    p->ensure_grad();
    for (std::size_t i = 0; i < n.grad.size(); ++i) p->grad[i] += n.grad[i] * c;
  });
}

Tensor sigmoid(const Tensor& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-a.values()[i]));
  check_finite(out, "sigmoid");
  return make_op(a.shape(), std::move(out), {a}, [](detail::Node& n) {
    auto& p = n.parents[0];
    if (!p->requires_grad) return;
    p->ensure_grad();
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      double s = n.value[i];
      p->grad[i] += n.grad[i] * s * (1.0 - s);
    }
  });
}

Tensor tanh(const Tensor& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(a.values()[i]);
  check_finite(out, "tanh");
  return make_op(a.shape(), std::move(out), {a}, [](detail::Node& n) {
    auto& p = n.parents[0];
    if (!p->requires_grad) return;
    p->ensure_grad();
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      double t = n.value[i];
      p->grad[i] += n.grad[i] * (1.0 - t * t);
    }
  });
}

Tensor matvec(const Tensor& m, const Tensor& v) {
  if (m.rank() != 2 || v.rank() != 1 || m.shape()[1] != v.shape()[0]) {
    throw std::invalid_argument("matvec: shape mismatch");
  }
  const std::size_t rows = m.shape()[0];
  const std::size_t cols = m.shape()[1];
  std::vector<double> out(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* mrow = m.values().data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += mrow[c] * v.values()[c];
    out[r] = acc;
  }
  check_finite(out, "matvec");
  return make_op({rows}, std::move(out), {m, v}, [rows, cols](detail::Node& n) {
    auto& pm = n.parents[0];
    auto& pv = n.parents[1];
    if (pm->requires_grad) {
      pm->ensure_grad();
      for (std::size_t r = 0; r < rows; ++r) {
        double g = n.grad[r];
        double* grow = pm->grad.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) grow[c] += g * pv->value[c];
      }
    }
    if (pv->requires_grad) {
      pv->ensure_grad();
      for (std::size_t r = 0; r < rows; ++r) {
        double g = n.grad[r];
        const double* mrow = pm->value.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) pv->grad[c] += g * mrow[c];
      }
    }
  });
}

Tensor row(const Tensor& m, std::size_t i) {
  if (m.rank() != 2) throw std::invalid_argument("row: expects a matrix");
  const std::size_t rows = m.shape()[0];
  const std::size_t cols = m.shape()[1];
  if (i >= rows) throw std::invalid_argument("row: index out of range");
  std::vector<double> out(m.values().begin() + i * cols, m.values().begin() + (i + 1) * cols);
  return make_op({cols}, std::move(out), {m}, [i, cols](detail::Node& n) {
    auto& p = n.parents[0];
    if (!p->requires_grad) return;
    p->ensure_grad();
    for (std::size_t c = 0; c < cols; ++c) p->grad[i * cols + c] += n.grad[c];
  });
}

Tensor concat(const Tensor& a, const Tensor& b) {
  if (a.rank() != 1 || b.rank() != 1) throw std::invalid_argument("concat: expects vectors");
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.values().begin(), a.values().end());
  out.insert(out.end(), b.values().begin(), b.values().end());
  const std::size_t na = a.size();
  return make_op({a.size() + b.size()}, std::move(out), {a, b}, [na](detail::Node& n) {
    auto& pa = n.parents[0];
    auto& pb = n.parents[1];
    if (pa->requires_grad) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < na; ++i) pa->grad[i] += n.grad[i];
    }
    if (pb->requires_grad) {
      pb->ensure_grad();
      for (std::size_t i = na; i < n.grad.size(); ++i) pb->grad[i - na] += n.grad[i];
    }
  });
}

Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (double x : a.values()) acc += x;
  if (!std::isfinite(acc)) throw std::runtime_error("non-finite value produced by sum");
  return make_op({1}, {acc}, {a}, [](detail::Node& n) {
    auto& p = n.parents[0];
    if (!p->requires_grad) return;
    p->ensure_grad();
    for (std::size_t i = 0; i < p->grad.size(); ++i) p->grad[i] += n.grad[0];
  });
}

Tensor dot(const Tensor& a, const Tensor& b) { return sum(mul(a, b)); }

Tensor smul(const Tensor& v, const Tensor& s) {
  if (s.size() != 1) throw std::invalid_argument("smul: scale must be a single-element tensor");
  const double c = s.values()[0];
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v.values()[i] * c;
  check_finite(out, "smul");
  return make_op(v.shape(), std::move(out), {v, s}, [](detail::Node& n) {
    auto& pv = n.parents[0];
    auto& ps = n.parents[1];
    if (pv->requires_grad) {
      pv->ensure_grad();
      const double c = ps->value[0];
      for (std::size_t i = 0; i < n.grad.size(); ++i) pv->grad[i] += n.grad[i] * c;
    }
    if (ps->requires_grad) {
      ps->ensure_grad();
      double acc = 0.0;
      for (std::size_t i = 0; i < n.grad.size(); ++i) acc += n.grad[i] * pv->value[i];
      ps->grad[0] += acc;
    }
  });
}

Tensor binary_cross_entropy(const Tensor& p, double label, double pos_weight) {
  if (p.size() != 1) throw std::invalid_argument("binary_cross_entropy: p must be scalar");
  if (label != 0.0 && label != 1.0) throw std::invalid_argument("binary_cross_entropy: label must be 0 or 1");
  constexpr double kEps = 1e-7;
  const double pc = std::clamp(p.values()[0], kEps, 1.0 - kEps);
  const double loss = -(pos_weight * label * std::log(pc) + (1.0 - label) * std::log(1.0 - pc));
  if (!std::isfinite(loss)) throw std::runtime_error("non-finite value produced by binary_cross_entropy");
  return make_op({1}, {loss}, {p}, [label, pos_weight](detail::Node& n) {
    auto& pp = n.parents[0];
    if (!pp->requires_grad) return;
    pp->ensure_grad();
    constexpr double kE = 1e-7;
    const double pc = std::clamp(pp->value[0], kE, 1.0 - kE);
    // zero slope in the clamped region, matching the clamped forward value
    if (pp->value[0] > kE && pp->value[0] < 1.0 - kE) {
      pp->grad[0] += n.grad[0] * (-(pos_weight * label / pc) + (1.0 - label) / (1.0 - pc));
    }
  });
}

void backward(const Tensor& loss) {
  if (loss.size() != 1) throw std::invalid_argument("backward: loss must be a scalar");

  // postorder DFS over the recorded graph, then reverse for topological order
  std::vector<detail::Node*> order;
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
      if (p->requires_grad && visited.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }

  loss.node()->ensure_grad();
  loss.node()->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* n = *it;
    if (n->backprop && !n->grad.empty()) n->backprop(*n);
  }
}

}  // namespace deltamine::nn
