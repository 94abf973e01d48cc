#include "grasplab/graph.hpp"

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace grasplab::ad {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const RowMat>;
using MMap = Eigen::Map<RowMat>;

double stable_softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double stable_sigmoid(double x) {
  if (x >= 0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

bool is_scalar(const Tensor& t) { return t.size() == 1 && t.rank() == 0; }

}  // namespace

const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::kConstant: return "constant";
    case OpKind::kInput: return "input";
    case OpKind::kParam: return "param";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kDiv: return "div";
    case OpKind::kMatmul: return "matmul";
    case OpKind::kConcatRows: return "concat_rows";
    case OpKind::kConcatCols: return "concat_cols";
    case OpKind::kReduceSum: return "reduce_sum";
    case OpKind::kReduceMean: return "reduce_mean";
    case OpKind::kRowMax: return "row_max";
    case OpKind::kBroadcastRows: return "broadcast_rows";
    case OpKind::kSliceRows: return "slice_rows";
    case OpKind::kSoftplus: return "softplus";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kSquare: return "square";
    case OpKind::kRelu: return "relu";
    case OpKind::kAbs: return "abs";
    case OpKind::kScale: return "scale";
    case OpKind::kAddConst: return "add_const";
  }
  return "?";
}

NodeRef Graph::push(Node n) {
  const int32_t id = static_cast<int32_t>(nodes_.size());
  if (finite_checks_) check_finite(n, id);
  nodes_.push_back(std::move(n));
  return NodeRef{id};
}

void Graph::check_finite(const Node& n, int32_t id) const {
  if (!n.value.all_finite()) {
    throw std::runtime_error("Graph: non-finite value at node " + std::to_string(id) +
                             " (" + op_name(n.kind) + ")");
  }
}

Graph::Node& Graph::at(NodeRef r) {
  if (!r.valid() || static_cast<size_t>(r.id) >= nodes_.size()) {
    throw std::out_of_range("Graph: invalid node reference");
  }
  return nodes_[static_cast<size_t>(r.id)];
}

const Tensor& Graph::value(NodeRef n) const {
  return nodes_.at(static_cast<size_t>(n.id)).value;
}

Tensor Graph::gradient(NodeRef n) const {
  const Node& node = nodes_.at(static_cast<size_t>(n.id));
  if (node.grad_alloc) return node.grad;
  return Tensor::zeros(node.value.shape());
}

Tensor& Graph::ensure_grad(int32_t id) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (!n.grad_alloc) {
    n.grad = Tensor::zeros(n.value.shape());
    n.grad_alloc = true;
  }
  return n.grad;
}

NodeRef Graph::constant(Tensor t) {
  Node n;
  n.kind = OpKind::kConstant;
  n.value = std::move(t);
  return push(std::move(n));
}

NodeRef Graph::input(Tensor t) {
  Node n;
  n.kind = OpKind::kInput;
  n.value = std::move(t);
  return push(std::move(n));
}

NodeRef Graph::param(const std::string& name) {
  if (!store_) throw std::logic_error("Graph: param() with no bound ParamStore");
  Node n;
  n.kind = OpKind::kParam;
  n.value = store_->value(name);
  n.param_name = name;
  return push(std::move(n));
}

namespace {
void require_elementwise(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b) && !is_scalar(a) && !is_scalar(b)) {
    throw std::invalid_argument(std::string("Graph: ") + op + " shape mismatch " +
                                a.shape_string() + " vs " + b.shape_string());
  }
}
}  // namespace

NodeRef Graph::add(NodeRef a, NodeRef b) {
  const Tensor& ta = val(a.id);
  const Tensor& tb = val(b.id);
  require_elementwise(ta, tb, "add");
  Node n;
  n.kind = OpKind::kAdd;
  n.inputs = {a.id, b.id};
  if (is_scalar(ta) && !is_scalar(tb)) {
    n.value = tb;
    for (int64_t i = 0; i < n.value.size(); ++i) n.value[i] += ta[0];
  } else if (is_scalar(tb) && !is_scalar(ta)) {
    n.value = ta;
    for (int64_t i = 0; i < n.value.size(); ++i) n.value[i] += tb[0];
  } else {
    n.value = ta;
    for (int64_t i = 0; i < n.value.size(); ++i) n.value[i] += tb[i];
  }
  return push(std::move(n));
}

NodeRef Graph::sub(NodeRef a, NodeRef b) {
  const Tensor& ta = val(a.id);
  const Tensor& tb = val(b.id);
  require_elementwise(ta, tb, "sub");
  Node n;
  n.kind = OpKind::kSub;
  n.inputs = {a.id, b.id};
  if (is_scalar(ta) && !is_scalar(tb)) {
    n.value = tb;
    for (int64_t i = 0; i < n.value.size(); ++i) n.value[i] = ta[0] - tb[i];
  } else if (is_scalar(tb) && !is_scalar(ta)) {
    n.value = ta;
    for (int64_t i = 0; i < n.value.size(); ++i) n.value[i] -= tb[0];
  } else {
    n.value = ta;
    for (int64_t i = 0; i < n.value.size(); ++i) n.value[i] -= tb[i];
  }
  return push(std::move(n));
}

NodeRef Graph::mul(NodeRef a, NodeRef b) {
  const Tensor& ta = val(a.id);
  const Tensor& tb = val(b.id);
  require_elementwise(ta, tb, "mul");
  Node n;
  n.kind = OpKind::kMul;
  n.inputs = {a.id, b.id};
  if (is_scalar(ta) && !is_scalar(tb)) {
    n.value = tb;
    for (int64_t i = 0; i < n.value.size(); ++i) n.value[i] *= ta[0];
  } else if (is_scalar(tb) && !is_scalar(ta)) {
    n.value = ta;
    for (int64_t i = 0; i < n.value.size(); ++i) n.value[i] *= tb[0];
  } else {
    n.value = ta;
    for (int64_t i = 0; i < n.value.size(); ++i) n.value[i] *= tb[i];
  }
  return push(std::move(n));
}

NodeRef Graph::div(NodeRef a, NodeRef b) {
  const Tensor& ta = val(a.id);
  const Tensor& tb = val(b.id);
  require_elementwise(ta, tb, "div");
  Node n;
  n.kind = OpKind::kDiv;
  n.inputs = {a.id, b.id};
  if (is_scalar(ta) && !is_scalar(tb)) {
    n.value = tb;
    for (int64_t i = 0; i < n.value.size(); ++i) n.value[i] = ta[0] / tb[i];
  } else if (is_scalar(tb) && !is_scalar(ta)) {
    n.value = ta;
    for (int64_t i = 0; i < n.value.size(); ++i) n.value[i] /= tb[0];
  } else {
    n.value = ta;
    for (int64_t i = 0; i < n.value.size(); ++i) n.value[i] /= tb[i];
  }
  return push(std::move(n));
}

NodeRef Graph::matmul(NodeRef a, NodeRef b) {
  const Tensor& ta = val(a.id);
  const Tensor& tb = val(b.id);
  if (ta.rank() != 2 || tb.rank() != 2 || ta.cols() != tb.rows()) {
    throw std::invalid_argument("Graph: matmul shape mismatch " + ta.shape_string() + " vs " +
                                tb.shape_string());
  }
  Node n;
  n.kind = OpKind::kMatmul;
  n.inputs = {a.id, b.id};
  n.value = Tensor::zeros({ta.rows(), tb.cols()});
  CMap A(ta.data(), ta.rows(), ta.cols());
  CMap B(tb.data(), tb.rows(), tb.cols());
  MMap C(n.value.data(), ta.rows(), tb.cols());
  C.noalias() = A * B;
  return push(std::move(n));
}

NodeRef Graph::concat_rows(const std::vector<NodeRef>& parts) {
  if (parts.empty()) throw std::invalid_argument("Graph: concat_rows with no parts");
  const bool rank2 = val(parts[0].id).rank() == 2;
  Node n;
  n.kind = OpKind::kConcatRows;
  if (rank2) {
    const int64_t cols = val(parts[0].id).cols();
    int64_t rows = 0;
    for (const NodeRef& p : parts) {
      const Tensor& t = val(p.id);
      if (t.rank() != 2 || t.cols() != cols) {
        throw std::invalid_argument("Graph: concat_rows column mismatch " + t.shape_string());
      }
      rows += t.rows();
      n.inputs.push_back(p.id);
    }
    n.value = Tensor::zeros({rows, cols});
    int64_t r = 0;
    for (const NodeRef& p : parts) {
      const Tensor& t = val(p.id);
      for (int64_t i = 0; i < t.size(); ++i) n.value[r * cols + i] = t[i];
      r += t.rows();
    }
  } else {
    int64_t len = 0;
    for (const NodeRef& p : parts) {
      const Tensor& t = val(p.id);
      if (t.rank() > 1) throw std::invalid_argument("Graph: concat_rows mixes ranks");
      len += t.size();
      n.inputs.push_back(p.id);
    }
    n.value = Tensor::zeros({len});
    int64_t k = 0;
    for (const NodeRef& p : parts) {
      const Tensor& t = val(p.id);
      for (int64_t i = 0; i < t.size(); ++i) n.value[k++] = t[i];
    }
  }
  return push(std::move(n));
}

NodeRef Graph::concat_cols(const std::vector<NodeRef>& parts) {
  if (parts.empty()) throw std::invalid_argument("Graph: concat_cols with no parts");
  const int64_t rows = val(parts[0].id).rows();
  int64_t cols = 0;
  Node n;
  n.kind = OpKind::kConcatCols;
  for (const NodeRef& p : parts) {
    const Tensor& t = val(p.id);
    if (t.rank() != 2 || t.rows() != rows) {
      throw std::invalid_argument("Graph: concat_cols row mismatch " + t.shape_string());
    }
    cols += t.cols();
    n.inputs.push_back(p.id);
  }
  n.value = Tensor::zeros({rows, cols});
  int64_t c0 = 0;
  for (const NodeRef& p : parts) {
    const Tensor& t = val(p.id);
    for (int64_t r = 0; r < rows; ++r) {
      for (int64_t c = 0; c < t.cols(); ++c) n.value[r * cols + c0 + c] = t.at(r, c);
    }
    c0 += t.cols();
  }
  return push(std::move(n));
}

NodeRef Graph::reduce_sum(NodeRef a) {
  const Tensor& ta = val(a.id);
  double s = 0.0;
  for (int64_t i = 0; i < ta.size(); ++i) s += ta[i];
  Node n;
  n.kind = OpKind::kReduceSum;
  n.inputs = {a.id};
  n.value = Tensor::scalar(s);
  return push(std::move(n));
}

NodeRef Graph::reduce_mean(NodeRef a) {
  const Tensor& ta = val(a.id);
  if (ta.size() == 0) throw std::invalid_argument("Graph: reduce_mean of empty tensor");
  double s = 0.0;
  for (int64_t i = 0; i < ta.size(); ++i) s += ta[i];
  Node n;
  n.kind = OpKind::kReduceMean;
  n.inputs = {a.id};
  n.value = Tensor::scalar(s / static_cast<double>(ta.size()));
  return push(std::move(n));
}

NodeRef Graph::row_max(NodeRef a) {
  const Tensor& ta = val(a.id);
  if (ta.rank() != 2 || ta.rows() == 0) {
    throw std::invalid_argument("Graph: row_max needs a nonempty rank-2 tensor, got " +
                                ta.shape_string());
  }
  const int64_t rows = ta.rows();
  const int64_t cols = ta.cols();
  Node n;
  n.kind = OpKind::kRowMax;
  n.inputs = {a.id};
  n.value = Tensor::zeros({1, cols});
  n.argmax.assign(static_cast<size_t>(cols), 0);
  for (int64_t c = 0; c < cols; ++c) {
    double best = ta.at(0, c);
    int32_t arg = 0;
    for (int64_t r = 1; r < rows; ++r) {
      const double v = ta.at(r, c);
      if (v > best) {
        best = v;
        arg = static_cast<int32_t>(r);
      }
    }
    n.value[c] = best;
    n.argmax[static_cast<size_t>(c)] = arg;
  }
  return push(std::move(n));
}

NodeRef Graph::broadcast_rows(NodeRef a, int64_t rows) {
  const Tensor& ta = val(a.id);
  if (rows <= 0) throw std::invalid_argument("Graph: broadcast_rows needs positive row count");
  int64_t cols;
  if (ta.rank() == 2 && ta.rows() == 1) {
    cols = ta.cols();
  } else if (ta.rank() == 1) {
    cols = ta.shape()[0];
  } else if (ta.rank() == 0) {
    cols = 1;
  } else {
    throw std::invalid_argument("Graph: broadcast_rows of shape " + ta.shape_string());
  }
  Node n;
  n.kind = OpKind::kBroadcastRows;
  n.inputs = {a.id};
  n.i0 = rows;
  n.value = Tensor::zeros({rows, cols});
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t c = 0; c < cols; ++c) n.value[r * cols + c] = ta[c];
  }
  return push(std::move(n));
}

NodeRef Graph::slice_rows(NodeRef a, int64_t start, int64_t len) {
  const Tensor& ta = val(a.id);
  if (start < 0 || len < 0 || start + len > ta.rows()) {
    throw std::invalid_argument("Graph: slice_rows out of range for " + ta.shape_string());
  }
  Node n;
  n.kind = OpKind::kSliceRows;
  n.inputs = {a.id};
  n.i0 = start;
  n.i1 = len;
  if (ta.rank() == 2) {
    const int64_t cols = ta.cols();
    n.value = Tensor::zeros({len, cols});
    for (int64_t r = 0; r < len; ++r) {
      for (int64_t c = 0; c < cols; ++c) n.value[r * cols + c] = ta.at(start + r, c);
    }
  } else if (ta.rank() == 1) {
    n.value = Tensor::zeros({len});
    for (int64_t i = 0; i < len; ++i) n.value[i] = ta[start + i];
  } else {
    throw std::invalid_argument("Graph: slice_rows of scalar");
  }
  return push(std::move(n));
}

#define GRASPLAB_UNARY(NAME, KIND, FWD)                     \
  NodeRef Graph::NAME(NodeRef a) {                          \
    const Tensor& ta = val(a.id);                           \
    Node n;                                                 \
    n.kind = KIND;                                          \
    n.inputs = {a.id};                                      \
    n.value = ta;                                           \
    for (int64_t i = 0; i < n.value.size(); ++i) {          \
      const double x = ta[i];                               \
      n.value[i] = (FWD);                                   \
    }                                                       \
    return push(std::move(n));                              \
  }

GRASPLAB_UNARY(softplus, OpKind::kSoftplus, stable_softplus(x))
GRASPLAB_UNARY(sigmoid, OpKind::kSigmoid, stable_sigmoid(x))
GRASPLAB_UNARY(exp, OpKind::kExp, std::exp(x))
GRASPLAB_UNARY(log, OpKind::kLog, std::log(x))
GRASPLAB_UNARY(square, OpKind::kSquare, x* x)
GRASPLAB_UNARY(relu, OpKind::kRelu, x > 0.0 ? x : 0.0)
GRASPLAB_UNARY(abs, OpKind::kAbs, std::abs(x))

#undef GRASPLAB_UNARY

NodeRef Graph::scale(NodeRef a, double c) {
  const Tensor& ta = val(a.id);
  Node n;
  n.kind = OpKind::kScale;
  n.inputs = {a.id};
  n.c0 = c;
  n.value = ta;
  for (int64_t i = 0; i < n.value.size(); ++i) n.value[i] *= c;
  return push(std::move(n));
}

NodeRef Graph::add_const(NodeRef a, double c) {
  const Tensor& ta = val(a.id);
  Node n;
  n.kind = OpKind::kAddConst;
  n.inputs = {a.id};
  n.c0 = c;
  n.value = ta;
  for (int64_t i = 0; i < n.value.size(); ++i) n.value[i] += c;
  return push(std::move(n));
}

void Graph::backward(NodeRef loss) {
  const Node& ln = at(loss);
  if (ln.value.size() != 1) {
    throw std::invalid_argument("Graph: backward needs a scalar loss, got " +
                                ln.value.shape_string());
  }
  // Pass-local gradient buffers so repeated backward calls accumulate
  // correctly without re-propagating earlier passes.
  std::vector<Tensor> g(nodes_.size());
  std::vector<bool> live(nodes_.size(), false);
  auto bump = [&](int32_t id) -> Tensor& {
    if (!live[static_cast<size_t>(id)]) {
      g[static_cast<size_t>(id)] = Tensor::zeros(nodes_[static_cast<size_t>(id)].value.shape());
      live[static_cast<size_t>(id)] = true;
    }
    return g[static_cast<size_t>(id)];
  };
  bump(loss.id)[0] = 1.0;

  for (int32_t id = loss.id; id >= 0; --id) {
    if (!live[static_cast<size_t>(id)]) continue;
    Node& n = nodes_[static_cast<size_t>(id)];
    const Tensor& gy = g[static_cast<size_t>(id)];
    switch (n.kind) {
      case OpKind::kConstant:
      case OpKind::kInput:
      case OpKind::kParam:
        break;
      case OpKind::kAdd:
      case OpKind::kSub: {
        const double sb = (n.kind == OpKind::kSub) ? -1.0 : 1.0;
        const Tensor& ta = val(n.inputs[0]);
        const Tensor& tb = val(n.inputs[1]);
        Tensor& ga = bump(n.inputs[0]);
        Tensor& gb = bump(n.inputs[1]);
        if (is_scalar(ta) && !is_scalar(tb)) {
          for (int64_t i = 0; i < gy.size(); ++i) {
            ga[0] += gy[i];
            gb[i] += sb * gy[i];
          }
        } else if (is_scalar(tb) && !is_scalar(ta)) {
          for (int64_t i = 0; i < gy.size(); ++i) {
            ga[i] += gy[i];
            gb[0] += sb * gy[i];
          }
        } else {
          for (int64_t i = 0; i < gy.size(); ++i) {
            ga[i] += gy[i];
            gb[i] += sb * gy[i];
          }
        }
        break;
      }
      case OpKind::kMul: {
        const Tensor& ta = val(n.inputs[0]);
        const Tensor& tb = val(n.inputs[1]);
        Tensor& ga = bump(n.inputs[0]);
        Tensor& gb = bump(n.inputs[1]);
        if (is_scalar(ta) && !is_scalar(tb)) {
          for (int64_t i = 0; i < gy.size(); ++i) {
            ga[0] += gy[i] * tb[i];
            gb[i] += gy[i] * ta[0];
          }
        } else if (is_scalar(tb) && !is_scalar(ta)) {
          for (int64_t i = 0; i < gy.size(); ++i) {
            ga[i] += gy[i] * tb[0];
            gb[0] += gy[i] * ta[i];
          }
        } else {
          for (int64_t i = 0; i < gy.size(); ++i) {
            ga[i] += gy[i] * tb[i];
            gb[i] += gy[i] * ta[i];
          }
        }
        break;
      }
      case OpKind::kDiv: {
        const Tensor& ta = val(n.inputs[0]);
        const Tensor& tb = val(n.inputs[1]);
        Tensor& ga = bump(n.inputs[0]);
        Tensor& gb = bump(n.inputs[1]);
        auto aval = [&](int64_t i) { return is_scalar(ta) ? ta[0] : ta[i]; };
        auto bval = [&](int64_t i) { return is_scalar(tb) ? tb[0] : tb[i]; };
        for (int64_t i = 0; i < gy.size(); ++i) {
          const double b = bval(i);
          const double da = gy[i] / b;
          const double db = -gy[i] * aval(i) / (b * b);
          if (is_scalar(ta)) ga[0] += da; else ga[i] += da;
          if (is_scalar(tb)) gb[0] += db; else gb[i] += db;
        }
        break;
      }
      case OpKind::kMatmul: {
        const Tensor& ta = val(n.inputs[0]);
        const Tensor& tb = val(n.inputs[1]);
        Tensor& ga = bump(n.inputs[0]);
        Tensor& gb = bump(n.inputs[1]);
        CMap A(ta.data(), ta.rows(), ta.cols());
        CMap B(tb.data(), tb.rows(), tb.cols());
        CMap GY(gy.data(), ta.rows(), tb.cols());
        MMap GA(ga.data(), ta.rows(), ta.cols());
        MMap GB(gb.data(), tb.rows(), tb.cols());
        GA.noalias() += GY * B.transpose();
        GB.noalias() += A.transpose() * GY;
        break;
      }
      case OpKind::kConcatRows: {
        int64_t off = 0;
        for (int32_t in : n.inputs) {
          const Tensor& t = val(in);
          Tensor& gi = bump(in);
          for (int64_t i = 0; i < t.size(); ++i) gi[i] += gy[off + i];
          off += t.size();
        }
        break;
      }
      case OpKind::kConcatCols: {
        const int64_t rows = n.value.rows();
        const int64_t cols = n.value.cols();
        int64_t c0 = 0;
        for (int32_t in : n.inputs) {
          const Tensor& t = val(in);
          Tensor& gi = bump(in);
          for (int64_t r = 0; r < rows; ++r) {
            for (int64_t c = 0; c < t.cols(); ++c) gi[r * t.cols() + c] += gy[r * cols + c0 + c];
          }
          c0 += t.cols();
        }
        break;
      }
      case OpKind::kReduceSum: {
        Tensor& ga = bump(n.inputs[0]);
        for (int64_t i = 0; i < ga.size(); ++i) ga[i] += gy[0];
        break;
      }
      case OpKind::kReduceMean: {
        Tensor& ga = bump(n.inputs[0]);
        const double w = gy[0] / static_cast<double>(ga.size());
        for (int64_t i = 0; i < ga.size(); ++i) ga[i] += w;
        break;
      }
      case OpKind::kRowMax: {
        const Tensor& ta = val(n.inputs[0]);
        Tensor& ga = bump(n.inputs[0]);
        const int64_t cols = ta.cols();
        for (int64_t c = 0; c < cols; ++c) {
          ga[n.argmax[static_cast<size_t>(c)] * cols + c] += gy[c];
        }
        break;
      }
      case OpKind::kBroadcastRows: {
        const Tensor& ta = val(n.inputs[0]);
        Tensor& ga = bump(n.inputs[0]);
        const int64_t cols = ta.size();
        for (int64_t r = 0; r < n.i0; ++r) {
          for (int64_t c = 0; c < cols; ++c) ga[c] += gy[r * cols + c];
        }
        break;
      }
      case OpKind::kSliceRows: {
        const Tensor& ta = val(n.inputs[0]);
        Tensor& ga = bump(n.inputs[0]);
        const int64_t cols = (ta.rank() == 2) ? ta.cols() : 1;
        for (int64_t r = 0; r < n.i1; ++r) {
          for (int64_t c = 0; c < cols; ++c) ga[(n.i0 + r) * cols + c] += gy[r * cols + c];
        }
        break;
      }
      case OpKind::kSoftplus: {
        const Tensor& ta = val(n.inputs[0]);
        Tensor& ga = bump(n.inputs[0]);
        for (int64_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * stable_sigmoid(ta[i]);
        break;
      }
      case OpKind::kSigmoid: {
        Tensor& ga = bump(n.inputs[0]);
        for (int64_t i = 0; i < gy.size(); ++i) {
          const double s = n.value[i];
          ga[i] += gy[i] * s * (1.0 - s);
        }
        break;
      }
      case OpKind::kExp: {
        Tensor& ga = bump(n.inputs[0]);
        for (int64_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * n.value[i];
        break;
      }
      case OpKind::kLog: {
        const Tensor& ta = val(n.inputs[0]);
        Tensor& ga = bump(n.inputs[0]);
        for (int64_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] / ta[i];
        break;
      }
      case OpKind::kSquare: {
        const Tensor& ta = val(n.inputs[0]);
        Tensor& ga = bump(n.inputs[0]);
        for (int64_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * 2.0 * ta[i];
        break;
      }
      case OpKind::kRelu: {
        const Tensor& ta = val(n.inputs[0]);
        Tensor& ga = bump(n.inputs[0]);
        for (int64_t i = 0; i < gy.size(); ++i) ga[i] += (ta[i] > 0.0) ? gy[i] : 0.0;
        break;
      }
      case OpKind::kAbs: {
        const Tensor& ta = val(n.inputs[0]);
        Tensor& ga = bump(n.inputs[0]);
        for (int64_t i = 0; i < gy.size(); ++i) {
          ga[i] += (ta[i] > 0.0) ? gy[i] : (ta[i] < 0.0 ? -gy[i] : 0.0);
        }
        break;
      }
      case OpKind::kScale: {
        Tensor& ga = bump(n.inputs[0]);
        for (int64_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * n.c0;
        break;
      }
      case OpKind::kAddConst: {
        Tensor& ga = bump(n.inputs[0]);
        for (int64_t i = 0; i < gy.size(); ++i) ga[i] += gy[i];
        break;
      }
    }
  }

  // Fold the pass gradients into the persistent accumulators.
  for (size_t id = 0; id < nodes_.size(); ++id) {
    if (!live[id]) continue;
    Node& n = nodes_[id];
    Tensor& acc = ensure_grad(static_cast<int32_t>(id));
    for (int64_t i = 0; i < acc.size(); ++i) acc[i] += g[id][i];
    if (n.kind == OpKind::kParam && store_) {
      store_->accumulate_grad(n.param_name, g[id]);
    }
  }
}

}  // namespace grasplab::ad
