#include "vars/aggregation.hpp"

#include <string>

#include "vars/errors.hpp"

namespace vars {

const char* to_string(AggregationKind kind) {
  switch (kind) {
    case AggregationKind::mean: return "mean";
    case AggregationKind::max: return "max";
    case AggregationKind::attention: return "attention";
  }
  return "?";
}

AggregationKind aggregation_kind_from_string(std::string_view name) {
  if (name == "mean") return AggregationKind::mean;
  if (name == "max") return AggregationKind::max;
  if (name == "attention") return AggregationKind::attention;
  throw ConfigError("unknown aggregation kind '" + std::string(name) +
                    "' (expected mean, max or attention)");
}

Matrix similarity(const FeatureMatrix& f, const Matrix& w) {
  if (w.rows != f.dim() || w.cols != f.dim())
    throw ShapeError("similarity: W must be " + std::to_string(f.dim()) + "x" +
                     std::to_string(f.dim()) + ", got " + shape_str(w));
  const Matrix fw = matmul(f.values, w);
  return matmul(fw, transpose(fw));
}

std::optional<Matrix> normalize_similarity(const Matrix& s) {
  if (s.rows != s.cols)
    throw ShapeError("normalize_similarity: matrix must be square, got " + shape_str(s));
  const Matrix rectified = relu(s);
  const double total = sum_all(rectified);
  if (total <= kDegenerateEps) return std::nullopt;
  return div_scalar(rectified, total);
}

AttentionWeights attention_scores(const std::optional<Matrix>& normalized,
                                  std::size_t n_views) {
  AttentionWeights a;
  if (!normalized.has_value()) {
    a.values = Vector(n_views, 1.0 / static_cast<double>(n_views));
    return a;
  }
  a.values = to_vector(row_sum(*normalized));
  return a;
}

Vector aggregate(const FeatureMatrix& f, const AttentionWeights& a) {
  if (a.values.len() != f.n_views())
    throw ShapeError("aggregate: " + std::to_string(a.values.len()) +
                     " weights for " + std::to_string(f.n_views()) + " views");
  return to_vector(matmul(transpose(f.values), as_column(a.values)));
}

PoolResult pool(const FeatureMatrix& f, AggregationKind kind, const Matrix* attention_w) {
  if (f.n_views() == 0)
    throw ShapeError("pool: feature matrix has no views");
  PoolResult out;
  switch (kind) {
    case AggregationKind::mean: {
      const Matrix ones(f.n_views(), 1, 1.0);
      out.representation = to_vector(
          scale(matmul(transpose(f.values), ones), 1.0 / static_cast<double>(f.n_views())));
      break;
    }
    case AggregationKind::max:
      out.representation = to_vector(transpose(col_max(f.values)));
      break;
    case AggregationKind::attention: {
      if (attention_w == nullptr)
        throw ConfigError("pool: attention aggregation requires a weight matrix W");
      const Matrix s = similarity(f, *attention_w);
      const AttentionWeights a = attention_scores(normalize_similarity(s), f.n_views());
      out.representation = aggregate(f, a);
      out.attention = a;
      break;
    }
  }
  return out;
}

PooledNodes pool_nodes(Tape& tape, NodeId features, AggregationKind kind,
                       std::optional<NodeId> attention_w) {
  const std::size_t n = tape.value(features).rows;
  if (n == 0) throw ShapeError("pool_nodes: feature node has no views");
  PooledNodes out;
  switch (kind) {
    case AggregationKind::mean: {
      const NodeId ones = tape.input(Matrix(n, 1, 1.0));
      out.representation = tape.scale(
          tape.matmul(tape.transpose(features), ones), 1.0 / static_cast<double>(n));
      break;
    }
    case AggregationKind::max:
      out.representation = tape.transpose(tape.col_max(features));
      break;
    case AggregationKind::attention: {
      if (!attention_w.has_value())
        throw ConfigError("pool_nodes: attention aggregation requires a W node");
      const NodeId fw = tape.matmul(features, *attention_w);
      const NodeId s = tape.matmul(fw, tape.transpose(fw));
      const NodeId rectified = tape.relu(s);
      const NodeId total = tape.sum_all(rectified);
      NodeId attention;
      if (tape.scalar_value(total) <= kDegenerateEps) {
        // Uniform fallback, recorded as a constant: no gradient flows into W
        // through a vanished similarity mass.
        attention = tape.input(Matrix(n, 1, 1.0 / static_cast<double>(n)));
        out.degenerate = true;
      } else {
        attention = tape.row_sum(tape.div_by_scalar(rectified, total));
      }
      out.attention = attention;
      out.representation = tape.matmul(tape.transpose(features), attention);
      break;
    }
  }
  return out;
}

std::size_t attention_parameter_count(std::size_t dim) { return dim * dim; }

}  // namespace vars
