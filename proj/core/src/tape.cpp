#include "vars/tape.hpp"

#include <cmath>

#include "vars/errors.hpp"

namespace vars {

const Matrix& GradientMap::at(NodeId id) const {
  if (!contains(id))
    throw ContractError("GradientMap: no gradient recorded for node " +
                        std::to_string(id.index));
  return grads_[id.index];
}

const Tape::Node& Tape::node(NodeId id) const {
  if (!id.valid() || id.index >= nodes_.size())
    throw ContractError("Tape: invalid node id");
  return nodes_[id.index];
}

NodeId Tape::push(Node n) {
  NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  nodes_.push_back(std::move(n));
  return id;
}

NodeId Tape::input(Matrix value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

NodeId Tape::parameter(Matrix value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

Matrix Tape::compute(const Node& n) const {
  switch (n.op) {
    case Op::leaf:
      return n.value;
    case Op::matmul:
      return vars::matmul(node(n.a).value, node(n.b).value);
    case Op::transpose:
      return vars::transpose(node(n.a).value);
    case Op::relu:
      return vars::relu(node(n.a).value);
    case Op::add:
      return vars::add(node(n.a).value, node(n.b).value);
    case Op::scale:
      return vars::scale(node(n.a).value, n.constant);
    case Op::sum_all: {
      Matrix out(1, 1);
      out.at(0, 0) = vars::sum_all(node(n.a).value);
      return out;
    }
    case Op::div_by_scalar:
      return vars::div_scalar(node(n.a).value, node(n.b).value.at(0, 0));
    case Op::row_sum:
      return vars::row_sum(node(n.a).value);
    case Op::col_max:
      return vars::col_max(node(n.a).value);
    case Op::broadcast_row:
      return vars::broadcast_row(node(n.a).value, static_cast<std::size_t>(n.constant));
    case Op::cross_entropy: {
      const Matrix& logits = node(n.a).value;
      double m = logits.data[0];
      for (double x : logits.data) m = x > m ? x : m;
      double z = 0.0;
      for (double x : logits.data) z += std::exp(x - m);
      Matrix out(1, 1);
      out.at(0, 0) = std::log(z) - (logits.data[static_cast<std::size_t>(n.label)] - m);
      return out;
    }
  }
  throw ContractError("Tape: unknown op");
}

NodeId Tape::push_derived(Node n) {
  n.requires_grad = (n.a.valid() && node(n.a).requires_grad) ||
                    (n.b.valid() && node(n.b).requires_grad);
  n.value = compute(n);
  return push(std::move(n));
}

NodeId Tape::matmul(NodeId a, NodeId b) {
  Node n;
  n.op = Op::matmul;
  n.a = a;
  n.b = b;
  return push_derived(std::move(n));
}

NodeId Tape::transpose(NodeId a) {
  Node n;
  n.op = Op::transpose;
  n.a = a;
  return push_derived(std::move(n));
}

NodeId Tape::relu(NodeId a) {
  Node n;
  n.op = Op::relu;
  n.a = a;
  return push_derived(std::move(n));
}

NodeId Tape::add(NodeId a, NodeId b) {
  Node n;
  n.op = Op::add;
  n.a = a;
  n.b = b;
  return push_derived(std::move(n));
}

NodeId Tape::scale(NodeId a, double c) {
  Node n;
  n.op = Op::scale;
  n.a = a;
  n.constant = c;
  return push_derived(std::move(n));
}

NodeId Tape::sum_all(NodeId a) {
  Node n;
  n.op = Op::sum_all;
  n.a = a;
  return push_derived(std::move(n));
}

NodeId Tape::div_by_scalar(NodeId a, NodeId denom) {
  if (node(denom).value.size() != 1)
    throw ShapeError("div_by_scalar: denominator node must be 1x1, got " +
                     shape_str(node(denom).value));
  Node n;
  n.op = Op::div_by_scalar;
  n.a = a;
  n.b = denom;
  return push_derived(std::move(n));
}

NodeId Tape::row_sum(NodeId a) {
  Node n;
  n.op = Op::row_sum;
  n.a = a;
  return push_derived(std::move(n));
}

NodeId Tape::col_max(NodeId a) {
  Node n;
  n.op = Op::col_max;
  n.a = a;
  return push_derived(std::move(n));
}

NodeId Tape::broadcast_row(NodeId row, std::size_t n_rows) {
  Node n;
  n.op = Op::broadcast_row;
  n.a = row;
  n.constant = static_cast<double>(n_rows);
  return push_derived(std::move(n));
}

NodeId Tape::cross_entropy(NodeId logits, int label) {
  const Matrix& l = node(logits).value;
  if (l.cols != 1 || l.rows == 0)
    throw ShapeError("cross_entropy: logits must be Kx1, got " + shape_str(l));
  if (label < 0 || static_cast<std::size_t>(label) >= l.rows)
    throw ContractError("cross_entropy: label " + std::to_string(label) +
                        " out of range for " + std::to_string(l.rows) + " classes");
  Node n;
  n.op = Op::cross_entropy;
  n.a = logits;
  n.label = label;
  return push_derived(std::move(n));
}

const Matrix& Tape::value(NodeId id) const { return node(id).value; }

double Tape::scalar_value(NodeId id) const {
  const Matrix& v = node(id).value;
  if (v.size() != 1)
    throw ContractError("scalar_value: node is " + shape_str(v) + ", not 1x1");
  return v.at(0, 0);
}

bool Tape::requires_grad(NodeId id) const { return node(id).requires_grad; }

void Tape::replay() {
  for (Node& n : nodes_)
    if (n.op != Op::leaf) n.value = compute(n);
}

namespace {

void accumulate(std::vector<Matrix>& adj, std::vector<char>& present, NodeId id,
                const Matrix& g) {
  Matrix& slot = adj[id.index];
  if (!present[id.index]) {
    slot = g;
    present[id.index] = 1;
    return;
  }
  for (std::size_t i = 0; i < slot.data.size(); ++i) slot.data[i] += g.data[i];
}

}  // namespace

GradientMap Tape::backward(NodeId loss) const {
  const Node& loss_node = node(loss);
  if (loss_node.value.size() != 1)
    throw ContractError("backward: loss node is " + shape_str(loss_node.value) +
                        ", expected a 1x1 scalar");

  GradientMap out;
  out.grads_.resize(nodes_.size());
  out.present_.assign(nodes_.size(), 0);

  Matrix seed(1, 1);
  seed.at(0, 0) = 1.0;
  accumulate(out.grads_, out.present_, loss, seed);

  for (std::uint32_t idx = loss.index + 1; idx-- > 0;) {
    if (!out.present_[idx]) continue;
    const Node& n = nodes_[idx];
    if (n.op == Op::leaf || !n.requires_grad) continue;
    const Matrix& g = out.grads_[idx];
    const bool wa = n.a.valid() && node(n.a).requires_grad;
    const bool wb = n.b.valid() && node(n.b).requires_grad;
    switch (n.op) {
      case Op::matmul: {
        if (wa)
          accumulate(out.grads_, out.present_, n.a,
                     vars::matmul(g, vars::transpose(node(n.b).value)));
        if (wb)
          accumulate(out.grads_, out.present_, n.b,
                     vars::matmul(vars::transpose(node(n.a).value), g));
        break;
      }
      case Op::transpose:
        if (wa) accumulate(out.grads_, out.present_, n.a, vars::transpose(g));
        break;
      case Op::relu: {
        if (!wa) break;
        const Matrix& in = node(n.a).value;
        Matrix ga = g;
        for (std::size_t i = 0; i < ga.data.size(); ++i)
          if (in.data[i] <= 0.0) ga.data[i] = 0.0;
        accumulate(out.grads_, out.present_, n.a, ga);
        break;
      }
      case Op::add:
        if (wa) accumulate(out.grads_, out.present_, n.a, g);
        if (wb) accumulate(out.grads_, out.present_, n.b, g);
        break;
      case Op::scale:
        if (wa) accumulate(out.grads_, out.present_, n.a, vars::scale(g, n.constant));
        break;
      case Op::sum_all: {
        if (!wa) break;
        const Matrix& in = node(n.a).value;
        accumulate(out.grads_, out.present_, n.a,
                   Matrix(in.rows, in.cols, g.at(0, 0)));
        break;
      }
      case Op::div_by_scalar: {
        const Matrix& a = node(n.a).value;
        const double denom = node(n.b).value.at(0, 0);
        if (wa)
          accumulate(out.grads_, out.present_, n.a, vars::div_scalar(g, denom));
        if (wb) {
          double acc = 0.0;
          for (std::size_t i = 0; i < a.data.size(); ++i) acc += g.data[i] * a.data[i];
          Matrix gd(1, 1);
          gd.at(0, 0) = -acc / (denom * denom);
          accumulate(out.grads_, out.present_, n.b, gd);
        }
        break;
      }
      case Op::row_sum: {
        if (!wa) break;
        const Matrix& in = node(n.a).value;
        Matrix ga(in.rows, in.cols);
        for (std::size_t i = 0; i < in.rows; ++i)
          for (std::size_t j = 0; j < in.cols; ++j) ga.at(i, j) = g.at(i, 0);
        accumulate(out.grads_, out.present_, n.a, ga);
        break;
      }
      case Op::col_max: {
        if (!wa) break;
        // Subgradient routed to the first row attaining the maximum.
        const Matrix& in = node(n.a).value;
        Matrix ga(in.rows, in.cols);
        for (std::size_t j = 0; j < in.cols; ++j) {
          std::size_t arg = 0;
          for (std::size_t i = 1; i < in.rows; ++i)
            if (in.at(i, j) > in.at(arg, j)) arg = i;
          ga.at(arg, j) = g.at(0, j);
        }
        accumulate(out.grads_, out.present_, n.a, ga);
        break;
      }
      case Op::broadcast_row: {
        if (!wa) break;
        Matrix ga(1, g.cols);
        for (std::size_t i = 0; i < g.rows; ++i)
          for (std::size_t j = 0; j < g.cols; ++j) ga.at(0, j) += g.at(i, j);
        accumulate(out.grads_, out.present_, n.a, ga);
        break;
      }
      case Op::cross_entropy: {
        if (!wa) break;
        const Matrix& logits = node(n.a).value;
        double m = logits.data[0];
        for (double x : logits.data) m = x > m ? x : m;
        double z = 0.0;
        for (double x : logits.data) z += std::exp(x - m);
        Matrix ga(logits.rows, 1);
        for (std::size_t i = 0; i < logits.rows; ++i)
          ga.at(i, 0) = std::exp(logits.data[i] - m) / z;
        ga.at(static_cast<std::size_t>(n.label), 0) -= 1.0;
        accumulate(out.grads_, out.present_, n.a, vars::scale(ga, g.at(0, 0)));
        break;
      }
      case Op::leaf:
        break;
    }
  }

  // Parameters the loss never touched still get a (zero) gradient entry.
  for (std::uint32_t idx = 0; idx < nodes_.size(); ++idx) {
    const Node& n = nodes_[idx];
    if (n.op == Op::leaf && n.requires_grad && !out.present_[idx]) {
      out.grads_[idx] = Matrix(n.value.rows, n.value.cols);
      out.present_[idx] = 1;
    }
  }
  return out;
}

}  // namespace vars
