#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vars/aggregation.hpp"
#include "vars/data.hpp"
#include "vars/matrix.hpp"

namespace vars {

enum class EncoderKind { identity, linear, mlp };
enum class WeightInit { fan_in, identity_matrix };
enum class LrDecayUnit { epochs, steps };

const char* to_string(EncoderKind kind);
EncoderKind encoder_kind_from_string(std::string_view name);

struct ModelConfig {
  EncoderKind encoder = EncoderKind::identity;
  std::size_t in_dim = 16;        // raw view dimension (linear/mlp encoders)
  std::size_t feature_dim = 16;   // d, the aggregated representation width
  std::size_t encoder_hidden = 32;
  std::size_t head_hidden = 16;   // h_c, hidden width of both heads
  AggregationKind aggregation = AggregationKind::attention;
  WeightInit attention_init = WeightInit::fan_in;
};

// Pluggable feature source -> aggregation block -> two classification heads
// (8-way foul type, 4-way offence severity). Biases are stored as column
// matrices so every parameter is a Matrix.
struct VarsModel {
  ModelConfig config;

  Matrix enc_w1, enc_b1;  // linear: d x in / mlp: h x in
  Matrix enc_w2, enc_b2;  // mlp only: d x h
  Matrix attention_w;     // d x d, attention aggregation only
  Matrix foul_w1, foul_b1, foul_w2, foul_b2;
  Matrix off_w1, off_b1, off_w2, off_b2;

  static VarsModel init(const ModelConfig& config, std::uint64_t seed);

  struct ParamRef {
    const char* name;
    Matrix* value;
  };
  std::vector<ParamRef> parameters();
  std::vector<std::pair<const char*, const Matrix*>> parameters() const;
  std::size_t parameter_count() const;
};

struct Prediction {
  Vector foul_logits;  // length 8
  Vector off_logits;   // length 4
  int foul_class = 0;  // argmax, ties -> lowest index
  int off_class = 0;
  std::optional<AttentionWeights> attention;  // attention aggregation only
};

Prediction forward(const VarsModel& model, const Matrix& views);

Vector softmax(const Vector& logits);

// -log softmax(logits)[label], max-subtracted for stability.
double cross_entropy(const Vector& logits, int label);

// Unweighted sum of the foul and offence-severity cross-entropies.
double multitask_loss(const Prediction& pred, int foul_label, int off_label);

// ---- optimizer -------------------------------------------------------------

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> m, v;
  std::int64_t step = 0;
  static AdamState init_for(const std::vector<VarsModel::ParamRef>& params);
};

// One bias-corrected Adam update over all parameter tensors.
void adam_step(const std::vector<VarsModel::ParamRef>& params,
               const std::vector<Matrix>& grads, AdamState& state, double lr,
               const AdamConfig& config = {});

// ---- training --------------------------------------------------------------

struct TrainConfig {
  double lr0 = 5e-5;
  double decay_factor = 0.3;
  int decay_every = 3;
  LrDecayUnit decay_unit = LrDecayUnit::epochs;
  int batch_size = 6;
  int max_epochs = 7;
  std::uint64_t seed = 0;
  // Task loss weights are fixed at (1, 1); see multitask_loss.
};

double lr_at_epoch(const TrainConfig& config, int epoch);
double lr_at_step(const TrainConfig& config, std::int64_t step);

struct BatchGrads {
  double loss = 0.0;               // mean multitask loss over the batch
  std::vector<Matrix> grads;       // aligned with VarsModel::parameters()
};

// Records the whole batch on one tape and runs the backward pass.
BatchGrads batch_loss_and_grads(VarsModel& model, std::span<const MultiViewSample> batch);

struct EpochStats {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;   // mean of batch losses
  double val_loss = 0.0;
  double val_foul_accuracy = 0.0;
  double val_off_accuracy = 0.0;
};

struct TrainResult {
  VarsModel model;  // checkpoint with the best validation offence accuracy
  std::vector<EpochStats> history;
  int best_epoch = -1;  // -1 when max_epochs == 0
  double best_val_off_accuracy = 0.0;
};

// Deterministic in config.seed: epoch shuffles, batching and updates replay
// identically. Keeps the parameters of the epoch with the highest validation
// offence-severity accuracy (earliest epoch wins ties).
TrainResult train(const VarsModel& initial, const Dataset& train_set,
                  const Dataset& val_set, const TrainConfig& config);

double mean_loss(const VarsModel& model, const Dataset& dataset);
// (foul accuracy, offence accuracy)
std::pair<double, double> accuracy_on(const VarsModel& model, const Dataset& dataset);

// ---- checkpoints -----------------------------------------------------------

struct Checkpoint {
  VarsModel model;
  TrainConfig train_config;
  std::vector<EpochStats> history;
  int best_epoch = -1;
};

// Versioned JSON container; layout documented in the README.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace vars
