#include "noiselab/tensor.hpp"

#include <algorithm>
#include <unordered_set>
#include <utility>

namespace noiselab {

std::string Shape::to_string() const {
  return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]";
}

namespace {
thread_local bool no_grad_active = false;
}  // namespace

NoGradGuard::NoGradGuard() : previous_(no_grad_active) { no_grad_active = true; }
NoGradGuard::~NoGradGuard() { no_grad_active = previous_; }
bool NoGradGuard::active() { return no_grad_active; }

ShapeError::ShapeError(const std::string& op, const std::string& detail)
    : std::invalid_argument("shape mismatch in " + op + ": " + detail) {}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return filled(shape, Scalar{0}, requires_grad);
}

Tensor Tensor::filled(Shape shape, Scalar value, bool requires_grad) {
  return from(shape, std::vector<Scalar>(shape.size(), value), requires_grad);
}

Tensor Tensor::from(Shape shape, std::vector<Scalar> values,
                    bool requires_grad) {
  if (values.size() != shape.size()) {
    throw ShapeError("from", shape.to_string() + " needs " +
                                 std::to_string(shape.size()) + " values, got " +
                                 std::to_string(values.size()));
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = shape;
  node->grad.assign(values.size(), Scalar{0});
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(Scalar value, bool requires_grad) {
  return from({1, 1}, {value}, requires_grad);
}

Tensor Tensor::make_op(const char* op, Shape shape, std::vector<Scalar> value,
                       std::vector<Tensor> inputs,
                       std::function<void(detail::Node&)> backward) {
  auto node = std::make_shared<detail::Node>();
  node->shape = shape;
  node->op = op;
  node->value = std::move(value);
  node->grad.assign(node->value.size(), Scalar{0});
  node->requires_grad =
      !no_grad_active &&
      std::any_of(inputs.begin(), inputs.end(),
                  [](const Tensor& t) { return t.requires_grad(); });
  node->inputs.reserve(inputs.size());
  for (auto& t : inputs) node->inputs.push_back(t.node_);
  // Constant subgraphs never run backward, so drop the closure and inputs.
  if (node->requires_grad) {
    node->backward = std::move(backward);
  } else {
    node->inputs.clear();
  }
  return Tensor(std::move(node));
}

Scalar Tensor::item() const {
  if (node_->value.size() != 1) {
    throw ShapeError("item", "expected 1x1, got " + node_->shape.to_string());
  }
  return node_->value[0];
}

void Tensor::zero_grad() {
  std::fill(node_->grad.begin(), node_->grad.end(), Scalar{0});
}

void Tensor::backward() {
  if (!node_->requires_grad) return;

  // Iterative post-order DFS over nodes that need gradients.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      detail::Node* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  // Leaves keep what they accumulated so far; this pass is computed into
  // clean buffers and added at the end, so k passes give exactly k times
  // the single-pass gradient for k = 2.
  std::vector<std::pair<detail::Node*, std::vector<Scalar>>> saved;
  for (detail::Node* n : order) {
    if (n->is_leaf()) {
      saved.emplace_back(n, n->grad);
    }
    std::fill(n->grad.begin(), n->grad.end(), Scalar{0});
  }
  std::fill(node_->grad.begin(), node_->grad.end(), Scalar{1});

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* n = *it;
    if (n->backward) n->backward(*n);
  }

  for (auto& [leaf, previous] : saved) {
    for (std::size_t i = 0; i < previous.size(); ++i) {
      leaf->grad[i] = previous[i] + leaf->grad[i];
    }
  }
}

Tensor Tensor::detach() const {
  return from(node_->shape, node_->value, false);
}

Tensor Tensor::clone() const {
  return from(node_->shape, node_->value, node_->requires_grad);
}

void assign_values(Tensor& dst, const Tensor& src) {
  if (!(dst.shape() == src.shape())) {
    throw ShapeError("assign_values",
                     dst.shape().to_string() + " vs " + src.shape().to_string());
  }
  std::copy(src.values().begin(), src.values().end(),
            dst.mutable_values().begin());
}

}  // namespace noiselab
