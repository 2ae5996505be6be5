#include <benchmark/benchmark.h>

#include "vars/aggregation.hpp"
#include "vars/agreement.hpp"
#include "vars/data.hpp"
#include "vars/metrics.hpp"
#include "vars/model.hpp"
#include "vars/rng.hpp"

using namespace vars;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (double& x : m.data) x = rng.uniform(-1.0, 1.0);
  return m;
}

void AttentionPool(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Matrix f = random_matrix(4, d, rng);
  const Matrix w = random_matrix(d, d, rng);
  for (auto _ : state) {
    PoolResult r = pool(FeatureMatrix(f), AggregationKind::attention, &w);
    benchmark::DoNotOptimize(r.representation.data.data());
  }
}
BENCHMARK(AttentionPool)->Arg(16)->Arg(64)->Arg(256);

void TrainingStep(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  ModelConfig mc;
  mc.encoder = EncoderKind::mlp;
  mc.in_dim = d;
  mc.feature_dim = d;
  mc.encoder_hidden = 2 * d;
  mc.head_hidden = d;
  mc.aggregation = AggregationKind::attention;
  VarsModel model = VarsModel::init(mc, 2);

  SyntheticSpec spec;
  spec.n_samples = 6;
  spec.dim = d;
  spec.seed = 3;
  const Dataset batch = generate_synthetic(spec).samples;

  auto params = model.parameters();
  AdamState adam = AdamState::init_for(params);
  for (auto _ : state) {
    const BatchGrads bg = batch_loss_and_grads(model, std::span(batch.data(), batch.size()));
    adam_step(params, bg.grads, adam, 1e-4);
    benchmark::DoNotOptimize(model.foul_w1.data.data());
  }
}
BENCHMARK(TrainingStep)->Arg(16)->Arg(64);

void ForwardInference(benchmark::State& state) {
  ModelConfig mc;
  mc.encoder = EncoderKind::identity;
  mc.in_dim = 16;
  mc.feature_dim = 16;
  mc.head_hidden = 16;
  mc.aggregation = AggregationKind::attention;
  const VarsModel model = VarsModel::init(mc, 4);
  Rng rng(5);
  const Matrix views = random_matrix(4, 16, rng);
  for (auto _ : state) {
    Prediction p = forward(model, views);
    benchmark::DoNotOptimize(p.foul_class);
  }
}
BENCHMARK(ForwardInference);

void AverageKappa(benchmark::State& state) {
  const auto raters = static_cast<std::size_t>(state.range(0));
  RaterTable t;
  t.labels = task_labels("offence_severity");
  Rng rng(6);
  for (std::size_t a = 0; a < 1000; ++a) {
    t.action_ids.push_back("a");
    t.ground_truth.push_back(static_cast<int>(rng.below(4)));
  }
  for (std::size_t r = 0; r < raters; ++r) t.rater_names.push_back("r");
  t.decisions.resize(1000 * raters);
  for (int& d : t.decisions) d = static_cast<int>(rng.below(4));
  for (auto _ : state) {
    KappaSummary s = average_kappa(t);
    benchmark::DoNotOptimize(s.average);
  }
}
BENCHMARK(AverageKappa)->Arg(5)->Arg(15);

}  // namespace

BENCHMARK_MAIN();
