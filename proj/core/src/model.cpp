#include "vars/model.hpp"

#include <algorithm>
#include <cmath>

#include "vars/errors.hpp"
#include "vars/rng.hpp"
#include "vars/tape.hpp"

namespace vars {

const char* to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::identity: return "identity";
    case EncoderKind::linear: return "linear";
    case EncoderKind::mlp: return "mlp";
  }
  return "?";
}

EncoderKind encoder_kind_from_string(std::string_view name) {
  if (name == "identity") return EncoderKind::identity;
  if (name == "linear") return EncoderKind::linear;
  if (name == "mlp") return EncoderKind::mlp;
  throw ConfigError("unknown encoder kind '" + std::string(name) +
                    "' (expected identity, linear or mlp)");
}

namespace {

Matrix uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng) {
  const double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Matrix m(rows, cols);
  for (double& x : m.data) x = rng.uniform(-limit, limit);
  return m;
}

}  // namespace

VarsModel VarsModel::init(const ModelConfig& config, std::uint64_t seed) {
  if (config.feature_dim == 0 || config.head_hidden == 0)
    throw ConfigError("VarsModel::init: dimensions must be positive");
  if (config.encoder == EncoderKind::identity && config.in_dim != config.feature_dim)
    throw ConfigError("VarsModel::init: identity encoder requires in_dim == feature_dim");

  Rng rng(Rng::mix(seed, 0x6d6f64656cULL));
  VarsModel m;
  m.config = config;
  const std::size_t d = config.feature_dim;

  switch (config.encoder) {
    case EncoderKind::identity:
      break;
    case EncoderKind::linear:
      m.enc_w1 = uniform_init(d, config.in_dim, config.in_dim, rng);
      m.enc_b1 = Matrix(d, 1);
      break;
    case EncoderKind::mlp:
      m.enc_w1 = uniform_init(config.encoder_hidden, config.in_dim, config.in_dim, rng);
      m.enc_b1 = Matrix(config.encoder_hidden, 1);
      m.enc_w2 = uniform_init(d, config.encoder_hidden, config.encoder_hidden, rng);
      m.enc_b2 = Matrix(d, 1);
      break;
  }
  if (config.aggregation == AggregationKind::attention) {
    m.attention_w = config.attention_init == WeightInit::identity_matrix
                        ? Matrix::identity(d)
                        : uniform_init(d, d, d, rng);
  }
  m.foul_w1 = uniform_init(config.head_hidden, d, d, rng);
  m.foul_b1 = Matrix(config.head_hidden, 1);
  m.foul_w2 = uniform_init(kFoulClasses, config.head_hidden, config.head_hidden, rng);
  m.foul_b2 = Matrix(kFoulClasses, 1);
  m.off_w1 = uniform_init(config.head_hidden, d, d, rng);
  m.off_b1 = Matrix(config.head_hidden, 1);
  m.off_w2 = uniform_init(kSeverityClasses, config.head_hidden, config.head_hidden, rng);
  m.off_b2 = Matrix(kSeverityClasses, 1);
  return m;
}

std::vector<VarsModel::ParamRef> VarsModel::parameters() {
  std::vector<ParamRef> out;
  auto push = [&out](const char* name, Matrix& m) {
    if (!m.empty()) out.push_back({name, &m});
  };
  push("enc_w1", enc_w1);
  push("enc_b1", enc_b1);
  push("enc_w2", enc_w2);
  push("enc_b2", enc_b2);
  push("attention_w", attention_w);
  push("foul_w1", foul_w1);
  push("foul_b1", foul_b1);
  push("foul_w2", foul_w2);
  push("foul_b2", foul_b2);
  push("off_w1", off_w1);
  push("off_b1", off_b1);
  push("off_w2", off_w2);
  push("off_b2", off_b2);
  return out;
}

std::vector<std::pair<const char*, const Matrix*>> VarsModel::parameters() const {
  auto refs = const_cast<VarsModel*>(this)->parameters();
  std::vector<std::pair<const char*, const Matrix*>> out;
  out.reserve(refs.size());
  for (const ParamRef& r : refs) out.push_back({r.name, r.value});
  return out;
}

std::size_t VarsModel::parameter_count() const {
  std::size_t total = 0;
  for (const auto& [name, m] : parameters()) total += m->size();
  return total;
}

namespace {

// Shared forward recipe. The value-level path and the tape path must apply
// the same kernels in the same order so eval and training agree bit for bit.

Matrix encode_values(const VarsModel& m, const Matrix& views) {
  switch (m.config.encoder) {
    case EncoderKind::identity:
      if (views.cols != m.config.feature_dim)
        throw ShapeError("forward: identity encoder expects dim " +
                         std::to_string(m.config.feature_dim) + ", got " + shape_str(views));
      return views;
    case EncoderKind::linear: {
      if (views.cols != m.config.in_dim)
        throw ShapeError("forward: encoder expects in_dim " +
                         std::to_string(m.config.in_dim) + ", got " + shape_str(views));
      return add(matmul(views, transpose(m.enc_w1)),
                 broadcast_row(transpose(m.enc_b1), views.rows));
    }
    case EncoderKind::mlp: {
      if (views.cols != m.config.in_dim)
        throw ShapeError("forward: encoder expects in_dim " +
                         std::to_string(m.config.in_dim) + ", got " + shape_str(views));
      const Matrix hidden = relu(add(matmul(views, transpose(m.enc_w1)),
                                     broadcast_row(transpose(m.enc_b1), views.rows)));
      return add(matmul(hidden, transpose(m.enc_w2)),
                 broadcast_row(transpose(m.enc_b2), views.rows));
    }
  }
  throw ContractError("encode_values: unknown encoder kind");
}

int argmax_lowest(const Vector& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.len(); ++i)
    if (v[i] > v[best]) best = i;
  return static_cast<int>(best);
}

struct HeadNodes {
  NodeId w1, b1, w2, b2;
};

NodeId head_logits(Tape& tape, const HeadNodes& h, NodeId rep) {
  const NodeId hidden = tape.relu(tape.add(tape.matmul(h.w1, rep), h.b1));
  return tape.add(tape.matmul(h.w2, hidden), h.b2);
}

}  // namespace

Prediction forward(const VarsModel& model, const Matrix& views) {
  if (views.rows == 0) throw ShapeError("forward: sample has no views");
  const Matrix f = encode_values(model, views);
  const PoolResult pooled =
      pool(FeatureMatrix(f), model.config.aggregation,
           model.config.aggregation == AggregationKind::attention ? &model.attention_w
                                                                  : nullptr);
  Prediction p;
  const Vector hidden_f =
      dense_layer(pooled.representation, model.foul_w1, to_vector(model.foul_b1),
                  Activation::relu);
  p.foul_logits = dense_layer(hidden_f, model.foul_w2, to_vector(model.foul_b2),
                              Activation::identity);
  const Vector hidden_o =
      dense_layer(pooled.representation, model.off_w1, to_vector(model.off_b1),
                  Activation::relu);
  p.off_logits = dense_layer(hidden_o, model.off_w2, to_vector(model.off_b2),
                             Activation::identity);
  p.foul_class = argmax_lowest(p.foul_logits);
  p.off_class = argmax_lowest(p.off_logits);
  p.attention = pooled.attention;
  if (!all_finite(as_column(p.foul_logits)) || !all_finite(as_column(p.off_logits)))
    throw ContractError("forward: non-finite logits");
  return p;
}

Vector softmax(const Vector& logits) {
  if (logits.len() == 0) throw ContractError("softmax: empty logits");
  double m = logits[0];
  for (std::size_t i = 1; i < logits.len(); ++i) m = std::max(m, logits[i]);
  Vector out(logits.len());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.len(); ++i) {
    out[i] = std::exp(logits[i] - m);
    z += out[i];
  }
  for (std::size_t i = 0; i < out.len(); ++i) out[i] /= z;
  return out;
}

double cross_entropy(const Vector& logits, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= logits.len())
    throw ContractError("cross_entropy: label " + std::to_string(label) +
                        " out of range for " + std::to_string(logits.len()) + " classes");
  double m = logits[0];
  for (std::size_t i = 1; i < logits.len(); ++i) m = std::max(m, logits[i]);
  double z = 0.0;
  for (std::size_t i = 0; i < logits.len(); ++i) z += std::exp(logits[i] - m);
  return std::log(z) - (logits[static_cast<std::size_t>(label)] - m);
}

double multitask_loss(const Prediction& pred, int foul_label, int off_label) {
  return cross_entropy(pred.foul_logits, foul_label) +
         cross_entropy(pred.off_logits, off_label);
}

AdamState AdamState::init_for(const std::vector<VarsModel::ParamRef>& params) {
  AdamState s;
  s.m.reserve(params.size());
  s.v.reserve(params.size());
  for (const auto& p : params) {
    s.m.emplace_back(p.value->size(), 0.0);
    s.v.emplace_back(p.value->size(), 0.0);
  }
  return s;
}

void adam_step(const std::vector<VarsModel::ParamRef>& params,
               const std::vector<Matrix>& grads, AdamState& state, double lr,
               const AdamConfig& config) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw ContractError("adam_step: parameter/gradient/state counts differ");
  state.step += 1;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Matrix& value = *params[p].value;
    const Matrix& g = grads[p];
    if (!value.same_shape(g))
      throw ContractError(std::string("adam_step: gradient shape mismatch for ") +
                          params[p].name);
    std::vector<double>& m = state.m[p];
    std::vector<double>& v = state.v[p];
    for (std::size_t i = 0; i < value.data.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g.data[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g.data[i] * g.data[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      value.data[i] -= lr * m_hat / (std::sqrt(v_hat) + config.eps);
    }
  }
}

double lr_at_epoch(const TrainConfig& config, int epoch) {
  if (epoch < 0) throw ContractError("lr_at_epoch: negative epoch");
  return config.lr0 *
         std::pow(config.decay_factor, static_cast<double>(epoch / config.decay_every));
}

double lr_at_step(const TrainConfig& config, std::int64_t step) {
  if (step < 0) throw ContractError("lr_at_step: negative step");
  return config.lr0 * std::pow(config.decay_factor,
                               static_cast<double>(step / config.decay_every));
}

BatchGrads batch_loss_and_grads(VarsModel& model, std::span<const MultiViewSample> batch) {
  if (batch.empty()) throw ContractError("batch_loss_and_grads: empty batch");

  Tape tape;
  const std::vector<VarsModel::ParamRef> params = model.parameters();
  std::vector<NodeId> param_nodes;
  param_nodes.reserve(params.size());
  for (const auto& p : params) param_nodes.push_back(tape.parameter(*p.value));

  auto param_node = [&](const char* name) -> std::optional<NodeId> {
    for (std::size_t i = 0; i < params.size(); ++i)
      if (std::string_view(params[i].name) == name) return param_nodes[i];
    return std::nullopt;
  };

  NodeId total;
  for (const MultiViewSample& sample : batch) {
    const std::size_t n = sample.views.rows;
    NodeId f = tape.input(sample.views);
    switch (model.config.encoder) {
      case EncoderKind::identity:
        if (sample.views.cols != model.config.feature_dim)
          throw ShapeError("train: identity encoder expects dim " +
                           std::to_string(model.config.feature_dim) + ", got " +
                           shape_str(sample.views));
        break;
      case EncoderKind::linear:
        f = tape.add(tape.matmul(f, tape.transpose(*param_node("enc_w1"))),
                     tape.broadcast_row(tape.transpose(*param_node("enc_b1")), n));
        break;
      case EncoderKind::mlp: {
        const NodeId hidden =
            tape.relu(tape.add(tape.matmul(f, tape.transpose(*param_node("enc_w1"))),
                               tape.broadcast_row(tape.transpose(*param_node("enc_b1")), n)));
        f = tape.add(tape.matmul(hidden, tape.transpose(*param_node("enc_w2"))),
                     tape.broadcast_row(tape.transpose(*param_node("enc_b2")), n));
        break;
      }
    }
    const PooledNodes pooled =
        pool_nodes(tape, f, model.config.aggregation, param_node("attention_w"));

    const HeadNodes foul_head{*param_node("foul_w1"), *param_node("foul_b1"),
                              *param_node("foul_w2"), *param_node("foul_b2")};
    const HeadNodes off_head{*param_node("off_w1"), *param_node("off_b1"),
                             *param_node("off_w2"), *param_node("off_b2")};
    const NodeId loss_foul =
        tape.cross_entropy(head_logits(tape, foul_head, pooled.representation),
                           sample.foul_label);
    const NodeId loss_off =
        tape.cross_entropy(head_logits(tape, off_head, pooled.representation),
                           sample.off_label);
    const NodeId sample_loss = tape.add(loss_foul, loss_off);
    total = total.valid() ? tape.add(total, sample_loss) : sample_loss;
  }
  const NodeId mean = tape.scale(total, 1.0 / static_cast<double>(batch.size()));

  const GradientMap grads = tape.backward(mean);
  BatchGrads out;
  out.loss = tape.scalar_value(mean);
  out.grads.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) out.grads.push_back(grads.at(param_nodes[i]));
  return out;
}

double mean_loss(const VarsModel& model, const Dataset& dataset) {
  if (dataset.empty()) throw ContractError("mean_loss: empty dataset");
  double total = 0.0;
  for (const MultiViewSample& s : dataset)
    total += multitask_loss(forward(model, s.views), s.foul_label, s.off_label);
  return total / static_cast<double>(dataset.size());
}

std::pair<double, double> accuracy_on(const VarsModel& model, const Dataset& dataset) {
  if (dataset.empty()) throw ContractError("accuracy_on: empty dataset");
  std::size_t foul_hits = 0, off_hits = 0;
  for (const MultiViewSample& s : dataset) {
    const Prediction p = forward(model, s.views);
    if (p.foul_class == s.foul_label) ++foul_hits;
    if (p.off_class == s.off_label) ++off_hits;
  }
  const double n = static_cast<double>(dataset.size());
  return {static_cast<double>(foul_hits) / n, static_cast<double>(off_hits) / n};
}

TrainResult train(const VarsModel& initial, const Dataset& train_set,
                  const Dataset& val_set, const TrainConfig& config) {
  if (train_set.empty() || val_set.empty())
    throw ContractError("train: train and validation sets must be non-empty");
  if (config.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (config.lr0 <= 0.0) throw ConfigError("train: lr0 must be positive");
  if (config.decay_factor <= 0.0 || config.decay_factor > 1.0)
    throw ConfigError("train: decay_factor must lie in (0, 1]");

  TrainResult result;
  result.model = initial;

  VarsModel current = initial;
  std::vector<VarsModel::ParamRef> params = current.parameters();
  AdamState adam = AdamState::init_for(params);
  Rng shuffle_rng(Rng::mix(config.seed, 0x7368756666ULL));

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<MultiViewSample> batch;
  double best_acc = -1.0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_set[order[i]]);
      const BatchGrads bg = batch_loss_and_grads(current, batch);
      const double lr = config.decay_unit == LrDecayUnit::epochs
                            ? lr_at_epoch(config, epoch)
                            : lr_at_step(config, adam.step);
      adam_step(params, bg.grads, adam, lr);
      loss_sum += bg.loss;
      ++batches;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.lr = config.decay_unit == LrDecayUnit::epochs ? lr_at_epoch(config, epoch)
                                                        : lr_at_step(config, adam.step - 1);
    stats.train_loss = loss_sum / static_cast<double>(batches);
    stats.val_loss = mean_loss(current, val_set);
    const auto [foul_acc, off_acc] = accuracy_on(current, val_set);
    stats.val_foul_accuracy = foul_acc;
    stats.val_off_accuracy = off_acc;
    result.history.push_back(stats);

    if (off_acc > best_acc) {
      best_acc = off_acc;
      result.model = current;
      result.best_epoch = epoch;
      result.best_val_off_accuracy = off_acc;
    }
  }
  return result;
}

}  // namespace vars
