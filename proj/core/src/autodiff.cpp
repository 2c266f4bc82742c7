#include "lagraph/autodiff.hpp"

#include <stdexcept>
#include <unordered_set>

namespace lagraph {

struct Value::Node {
  Matrix value;
  Matrix grad;
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  OpBuilder::BackwardFn fn;
};

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Value Value::constant(Matrix m) {
  auto n = std::make_shared<Node>();
  n->value = std::move(m);
  n->op = "constant";
  return Value(std::move(n));
}

Value Value::parameter(Matrix m) {
  auto n = std::make_shared<Node>();
  n->value = std::move(m);
  n->requires_grad = true;
  n->op = "parameter";
  return Value(std::move(n));
}

const Matrix& Value::value() const {
  if (!node_) throw std::logic_error("use of undefined Value");
  return node_->value;
}

Matrix& Value::mutable_value() {
  if (!node_) throw std::logic_error("use of undefined Value");
  return node_->value;
}

bool Value::requires_grad() const { return node_ && node_->requires_grad; }
bool Value::is_leaf() const { return node_ && !node_->fn; }
std::string_view Value::op() const { return node_ ? node_->op : "undefined"; }
std::size_t Value::input_count() const { return node_ ? node_->inputs.size() : 0; }

Matrix Value::grad() const {
  const Matrix& v = value();
  if (node_->grad.empty() && !v.empty()) return Matrix(v.rows(), v.cols());
  return node_->grad;
}

bool Value::has_grad() const { return node_ && !node_->grad.empty(); }

void Value::zero_grad() {
  if (node_) node_->grad = Matrix();
}

Value OpBuilder::make(const char* op, Matrix value, std::vector<Value> inputs, BackwardFn fn) {
  auto n = std::make_shared<Value::Node>();
  n->value = std::move(value);
  n->op = op;
  if (!g_grad_enabled) return Value(std::move(n));
  bool any = false;
  for (const auto& in : inputs) any = any || in.requires_grad();
  if (!any) return Value(std::move(n));
  n->requires_grad = true;
  n->inputs.reserve(inputs.size());
  for (auto& in : inputs) n->inputs.push_back(in.node_);
  n->fn = std::move(fn);
  return Value(std::move(n));
}

void backward(const Value& loss) {
  if (!loss.defined()) throw std::logic_error("backward on undefined Value");
  const Matrix& lv = loss.value();
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ShapeError("backward requires a 1x1 loss, got " + shape_string(lv.rows(), lv.cols()));
  }
  if (!loss.requires_grad()) return;

  using Node = Value::Node;
  // Iterative post-order DFS gives a topological order (inputs first).
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{loss.node_.get(), 0}};
  seen.insert(loss.node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) stack.push_back({child, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  Node* root = loss.node_.get();
  if (root->grad.empty()) root->grad = Matrix(1, 1, 0.0);
  root->grad(0, 0) += 1.0;

  std::vector<Matrix*> in_grads;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (!node->fn) continue;
    if (node->grad.empty()) node->grad = Matrix(node->value.rows(), node->value.cols());
    in_grads.assign(node->inputs.size(), nullptr);
    for (std::size_t i = 0; i < node->inputs.size(); ++i) {
      Node* in = node->inputs[i].get();
      if (!in->requires_grad) continue;
      if (in->grad.empty()) in->grad = Matrix(in->value.rows(), in->value.cols());
      in_grads[i] = &in->grad;
    }
    node->fn(node->grad, in_grads);
  }

  // Drop the recorded graph; parameters survive as leaves.
  for (Node* node : order) {
    if (node->fn) {
      node->fn = nullptr;
      node->inputs.clear();
    }
  }
}

}  // namespace lagraph
