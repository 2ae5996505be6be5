#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "vars/matrix.hpp"

namespace vars {

struct NodeId {
  std::uint32_t index = std::numeric_limits<std::uint32_t>::max();
  bool valid() const { return index != std::numeric_limits<std::uint32_t>::max(); }
};

// Gradients produced by Tape::backward, addressed by node id. Only nodes on a
// differentiable path from a parameter to the loss carry an entry.
class GradientMap {
 public:
  bool contains(NodeId id) const {
    return id.index < present_.size() && present_[id.index];
  }
  const Matrix& at(NodeId id) const;

 private:
  friend class Tape;
  std::vector<Matrix> grads_;
  std::vector<char> present_;
};

// Reverse-mode gradient tape over the matrix kernels in matrix.hpp.
//
// Operations append nodes as they execute, so node ids are already a
// topological order of the computation graph: the backward pass is a single
// reverse walk, and replay() a single forward walk through the same kernels,
// reproducing every recorded value bit for bit.
class Tape {
 public:
  // Leaves. input() is held constant; parameter() receives a gradient.
  NodeId input(Matrix value);
  NodeId parameter(Matrix value);

  NodeId matmul(NodeId a, NodeId b);
  NodeId transpose(NodeId a);
  NodeId relu(NodeId a);
  NodeId add(NodeId a, NodeId b);                  // same shape
  NodeId scale(NodeId a, double c);
  NodeId sum_all(NodeId a);                        // -> 1 x 1
  NodeId div_by_scalar(NodeId a, NodeId denom);    // denom is a 1 x 1 node
  NodeId row_sum(NodeId a);                        // n x m -> n x 1
  NodeId col_max(NodeId a);                        // n x m -> 1 x m
  NodeId broadcast_row(NodeId row, std::size_t n); // 1 x m -> n x m
  // -log softmax(logits)[label] with max-subtraction; logits must be K x 1.
  NodeId cross_entropy(NodeId logits, int label);

  const Matrix& value(NodeId id) const;
  double scalar_value(NodeId id) const;  // requires a 1 x 1 node
  bool requires_grad(NodeId id) const;
  std::size_t size() const { return nodes_.size(); }

  // Accumulates d(loss)/d(node) for every node reachable backwards from
  // `loss`, visiting nodes in strict reverse recording order. The loss node
  // must be scalar (1 x 1).
  GradientMap backward(NodeId loss) const;

  // Recomputes every derived node value from the leaves, in recording order.
  void replay();

 private:
  enum class Op : std::uint8_t {
    leaf,
    matmul,
    transpose,
    relu,
    add,
    scale,
    sum_all,
    div_by_scalar,
    row_sum,
    col_max,
    broadcast_row,
    cross_entropy,
  };

  struct Node {
    Op op = Op::leaf;
    NodeId a;
    NodeId b;
    Matrix value;
    double constant = 0.0;  // scale factor / broadcast height
    int label = -1;         // cross_entropy target
    bool requires_grad = false;
  };

  NodeId push(Node node);
  NodeId push_derived(Node node);
  Matrix compute(const Node& node) const;
  const Node& node(NodeId id) const;

  std::vector<Node> nodes_;
};

}  // namespace vars
