#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grasplab/params.hpp"
#include "grasplab/tensor.hpp"

namespace grasplab::ad {

struct NodeRef {
  int32_t id = -1;
  bool valid() const { return id >= 0; }
};

enum class OpKind : uint8_t {
  kConstant,
  kInput,
  kParam,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kMatmul,
  kConcatRows,
  kConcatCols,
  kReduceSum,
  kReduceMean,
  kRowMax,
  kBroadcastRows,
  kSliceRows,
  kSoftplus,
  kSigmoid,
  kExp,
  kLog,
  kSquare,
  kRelu,
  kAbs,
  kScale,
  kAddConst,
};

const char* op_name(OpKind k);

/// Dynamic reverse-mode tape. Values are computed eagerly as nodes are
/// appended; backward() replays the tape in reverse. A Graph is confined to
/// one thread; many Graphs may share one read-only ParamStore snapshot, and
/// backward() accumulates parameter gradients into the bound store.
class Graph {
 public:
  Graph() = default;
  explicit Graph(ParamStore* store) : store_(store) {}

  void bind_store(ParamStore* store) { store_ = store; }

  NodeRef constant(Tensor t);
  NodeRef scalar(double v) { return constant(Tensor::scalar(v)); }
  /// Differentiable leaf; its gradient is readable after backward().
  NodeRef input(Tensor t);
  /// Leaf bound to a named parameter in the store (value copied at creation).
  NodeRef param(const std::string& name);

  NodeRef add(NodeRef a, NodeRef b);
  NodeRef sub(NodeRef a, NodeRef b);
  NodeRef mul(NodeRef a, NodeRef b);
  NodeRef div(NodeRef a, NodeRef b);
  NodeRef matmul(NodeRef a, NodeRef b);
  NodeRef concat_rows(const std::vector<NodeRef>& parts);
  NodeRef concat_cols(const std::vector<NodeRef>& parts);
  NodeRef reduce_sum(NodeRef a);
  NodeRef reduce_mean(NodeRef a);
  /// Column-wise max over rows of [N,D] -> [1,D]; argmax rows recorded for
  /// the backward pass. Permutation-invariant over rows.
  NodeRef row_max(NodeRef a);
  NodeRef broadcast_rows(NodeRef a, int64_t n);
  NodeRef slice_rows(NodeRef a, int64_t start, int64_t len);
  NodeRef softplus(NodeRef a);
  NodeRef sigmoid(NodeRef a);
  NodeRef exp(NodeRef a);
  NodeRef log(NodeRef a);
  NodeRef square(NodeRef a);
  NodeRef relu(NodeRef a);
  NodeRef abs(NodeRef a);
  NodeRef scale(NodeRef a, double c);
  NodeRef add_const(NodeRef a, double c);

  /// Reverse pass from a scalar loss. Gradients accumulate on nodes (and
  /// into the bound ParamStore for param leaves); repeated calls keep
  /// accumulating.
  void backward(NodeRef loss);

  const Tensor& value(NodeRef n) const;
  /// Gradient of the last backward passes w.r.t. node n (zeros if the node
  /// was never reached).
  Tensor gradient(NodeRef n) const;
  double scalar_value(NodeRef n) const { return value(n).scalar_value(); }

  size_t node_count() const { return nodes_.size(); }

  /// Finite checks scan every op output; on by default. The check failure
  /// message carries the node index and op kind.
  void set_finite_checks(bool on) { finite_checks_ = on; }

 private:
  struct Node {
    OpKind kind;
    std::vector<int32_t> inputs;
    Tensor value;
    Tensor grad;          // allocated on demand
    bool grad_alloc = false;
    double c0 = 0.0;      // scale factor / added constant
    int64_t i0 = 0;       // slice start / broadcast rows
    int64_t i1 = 0;       // slice length
    std::vector<int32_t> argmax;  // RowMax winners, one per column
    std::string param_name;
  };

  NodeRef push(Node n);
  Node& at(NodeRef r);
  const Tensor& val(int32_t id) const { return nodes_[static_cast<size_t>(id)].value; }
  Tensor& ensure_grad(int32_t id);
  void check_finite(const Node& n, int32_t id) const;

  std::vector<Node> nodes_;
  ParamStore* store_ = nullptr;
  bool finite_checks_ = true;
};

}  // namespace grasplab::ad
