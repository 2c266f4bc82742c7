#pragma once

#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include "lagraph/matrix.hpp"

namespace lagraph {

/// A node of the reverse-mode differentiation graph: a dense matrix plus
/// the operation that produced it. Copies share the node.
class Value {
 public:
  Value() = default;

  /// Leaf that never receives a gradient.
  static Value constant(Matrix m);
  /// Leaf that accumulates a gradient during backward().
  static Value parameter(Matrix m);

  bool defined() const noexcept { return node_ != nullptr; }
  const Matrix& value() const;
  /// Direct access for optimizers and tests; invalidates nothing recorded.
  Matrix& mutable_value();
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

  bool requires_grad() const;
  bool is_leaf() const;
  std::string_view op() const;

  /// Accumulated gradient; zeros of the value's shape if none was recorded.
  Matrix grad() const;
  bool has_grad() const;
  void zero_grad();

  /// Identity of the underlying node.
  const void* id() const noexcept { return node_.get(); }
  std::size_t input_count() const;

 private:
  struct Node;
  explicit Value(std::shared_ptr<Node> node) : node_(std::move(node)) {}
  std::shared_ptr<Node> node_;

  friend class OpBuilder;
  friend void backward(const Value& loss);
};

/// Records a new operation. Used by the operation implementations; inputs
/// that do not require gradients receive none.
class OpBuilder {
 public:
  using BackwardFn = std::function<void(const Matrix& out_grad, std::vector<Matrix*>& in_grads)>;

  static Value make(const char* op, Matrix value, std::vector<Value> inputs, BackwardFn fn);
};

/// Reverse-mode sweep from a 1x1 loss. Gradients of shared subexpressions
/// sum. The recorded graph is released afterwards; leaves keep their grads.
void backward(const Value& loss);

bool grad_enabled();

/// Disables recording for its lifetime (evaluation, Monte-Carlo sweeps).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

}  // namespace lagraph
