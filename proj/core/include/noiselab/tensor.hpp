#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace noiselab {

#ifdef NOISELAB_USE_FLOAT32
using Scalar = float;
#else
using Scalar = double;
#endif

// Row-major 2-D shape. Scalars are 1x1, vectors are 1xn.
struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
  std::string to_string() const;
};

// Thrown when an op receives operands of incompatible shapes.
class ShapeError : public std::invalid_argument {
 public:
  ShapeError(const std::string& op, const std::string& detail);
};

// Thrown when a non-finite value shows up where it must not.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct Node {
  Shape shape;
  std::vector<Scalar> value;
  std::vector<Scalar> grad;
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  // Propagates this node's grad into its inputs' grads.
  std::function<void(Node&)> backward;

  bool is_leaf() const { return inputs.empty(); }
};

}  // namespace detail

// Handle to a node of the computation graph. Copies share the node, so a
// parameter tensor held by a model and the same tensor referenced from a
// graph see the same values and gradient.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor filled(Shape shape, Scalar value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<Scalar> values,
                     bool requires_grad = false);
  static Tensor scalar(Scalar value, bool requires_grad = false);

  // Internal constructor used by ops.
  static Tensor make_op(const char* op, Shape shape, std::vector<Scalar> value,
                        std::vector<Tensor> inputs,
                        std::function<void(detail::Node&)> backward);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rows() const { return node_->shape.rows; }
  std::size_t cols() const { return node_->shape.cols; }
  std::size_t size() const { return node_->value.size(); }
  bool requires_grad() const { return node_->requires_grad; }
  const char* op_name() const { return node_->op; }

  std::span<const Scalar> values() const { return node_->value; }
  std::span<Scalar> mutable_values() { return node_->value; }
  std::span<const Scalar> grad() const { return node_->grad; }
  std::span<Scalar> mutable_grad() { return node_->grad; }

  Scalar at(std::size_t r, std::size_t c) const {
    return node_->value[r * node_->shape.cols + c];
  }
  Scalar& at(std::size_t r, std::size_t c) {
    return node_->value[r * node_->shape.cols + c];
  }
  // Value of a 1x1 tensor.
  Scalar item() const;

  void zero_grad();

  // Reverse-mode sweep from this tensor, seeding its gradient with ones.
  // Leaves accumulate across calls; interior gradients are recomputed.
  void backward();

  // Constant leaf holding a copy of the current values.
  Tensor detach() const;
  // Independent leaf with copied values and the same requires_grad flag.
  Tensor clone() const;

  detail::Node& node() const { return *node_; }
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

  std::shared_ptr<detail::Node> node_;
};

// While alive, ops on this thread build constant nodes only (inference).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

  static bool active();

 private:
  bool previous_;
};

// Copies values of src into dst (same shapes).
void assign_values(Tensor& dst, const Tensor& src);

}  // namespace noiselab
