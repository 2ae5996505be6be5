#pragma once

#include <optional>
#include <string_view>

#include "vars/matrix.hpp"
#include "vars/tape.hpp"

namespace vars {

enum class AggregationKind { mean, max, attention };

const char* to_string(AggregationKind kind);
AggregationKind aggregation_kind_from_string(std::string_view name);

// Per-view feature vectors, one view per row.
struct FeatureMatrix {
  Matrix values;  // n_views x dim

  FeatureMatrix() = default;
  explicit FeatureMatrix(Matrix m) : values(std::move(m)) {}

  std::size_t n_views() const { return values.rows; }
  std::size_t dim() const { return values.cols; }
};

// Per-view importance; nonnegative, sums to 1.
struct AttentionWeights {
  Vector values;
};

// Below this total similarity mass the attention weights fall back to
// uniform (and gradients through them are stopped).
inline constexpr double kDegenerateEps = 1e-12;

// S = (fW)(fW)^T : pairwise similarity of the projected view features.
Matrix similarity(const FeatureMatrix& f, const Matrix& w);

// ReLU(S) normalized by its total mass; nullopt when the mass is <= eps.
std::optional<Matrix> normalize_similarity(const Matrix& s);

// Row sums of the normalized similarity; uniform 1/n for the degenerate case.
AttentionWeights attention_scores(const std::optional<Matrix>& normalized,
                                  std::size_t n_views);

// R_k = sum_j A_j * f[j][k]
Vector aggregate(const FeatureMatrix& f, const AttentionWeights& a);

struct PoolResult {
  Vector representation;                     // length dim
  std::optional<AttentionWeights> attention; // attention kind only
};

// Mean / max / attention pooling of the view features into one vector.
// `attention_w` must be a dim x dim matrix for the attention kind.
PoolResult pool(const FeatureMatrix& f, AggregationKind kind,
                const Matrix* attention_w = nullptr);

// Tape-recorded pooling for training. `features` is an n x d node.
struct PooledNodes {
  NodeId representation;             // d x 1
  std::optional<NodeId> attention;   // n x 1; set for the attention kind
  bool degenerate = false;
};
PooledNodes pool_nodes(Tape& tape, NodeId features, AggregationKind kind,
                       std::optional<NodeId> attention_w = std::nullopt);

// Extra trainable parameters the attention kind carries over mean/max: d^2.
std::size_t attention_parameter_count(std::size_t dim);

}  // namespace vars
