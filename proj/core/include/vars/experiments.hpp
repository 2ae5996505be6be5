#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vars/agreement.hpp"
#include "vars/data.hpp"
#include "vars/metrics.hpp"
#include "vars/model.hpp"

namespace vars {

// Training recipe shared by the synthetic-data experiments (compare/sweep):
// mlp encoder, identity-initialized attention weights, constant learning
// rate tuned for from-scratch training at desk scale.
struct ExperimentProtocol {
  ModelConfig model;
  TrainConfig train;
};
ExperimentProtocol synthetic_protocol();

// Runs train+eval once and reports both tasks on `test`.
struct EvalReports {
  MetricsReport foul;
  MetricsReport off;
};
EvalReports evaluate_metrics(const VarsModel& model, const Dataset& test);

// ---- pooling comparison ------------------------------------------------

struct ComparisonCell {
  double foul_accuracy = 0.0;
  double foul_balanced_accuracy = 0.0;
  double off_accuracy = 0.0;
  double off_balanced_accuracy = 0.0;
};

struct ComparisonRow {
  std::string encoder_tag;
  AggregationKind kind;
  ComparisonCell mean;                  // over seeds
  std::vector<ComparisonCell> per_seed;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::vector<std::uint64_t> seeds;
};

// One model per (pooling kind x seed), shared splits, mean over seeds.
ComparisonTable run_comparison(const Split& split, std::span<const AggregationKind> kinds,
                               std::span<const std::uint64_t> seeds,
                               const ExperimentProtocol& protocol);

// ---- dataset-size sensitivity sweep -------------------------------------

struct SweepPoint {
  double fraction = 0.0;
  std::vector<double> foul_accuracies;  // one per repeat (empty at fraction 0)
  std::vector<double> off_accuracies;
  double foul_mean = 0.0, foul_std = 0.0;
  double off_mean = 0.0, off_std = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  int repeats = 0;
  double random_foul = 1.0 / 8.0;  // uniform-random baseline, reported at 0%
  double random_off = 1.0 / 4.0;
};

// Trains `repeats` models per fraction on stratified subsets of split.train
// and evaluates every run on the fixed split.test. Fraction 0 is the random
// baseline. `threads` > 1 distributes runs; results are merged by
// (fraction, repeat) index, so parallel equals serial bit for bit.
SweepResult run_sweep(const Split& split, std::span<const double> fractions, int repeats,
                      const ExperimentProtocol& protocol, std::uint64_t seed,
                      int threads = 1);

// ---- per-action attention inspection -------------------------------------

struct InspectReport {
  std::string action_id;
  std::vector<double> attention_percent;  // per view, sums to 100
  std::vector<std::size_t> view_ranking;  // view indices, most attended first
  Prediction prediction;
  Vector foul_confidence;  // softmax of the logits
  Vector off_confidence;
  std::string foul_name;
  std::string off_name;
};

// Requires an attention-aggregation model.
InspectReport inspect_action(const VarsModel& model, const MultiViewSample& sample);

// ---- rater agreement ------------------------------------------------------

struct GroupAgreement {
  std::string group;
  KappaSummary kappa;
  std::vector<double> consensus_percent;
};

struct AgreementReport {
  std::vector<std::string> rater_names;
  std::vector<double> rater_accuracies;
  std::vector<GroupAgreement> groups;  // one entry per declared group, or "all"
};

AgreementReport run_agreement(const RaterTable& table);

// ---- reports and manifests --------------------------------------------

std::string to_json(const ComparisonTable& table);
std::string to_csv(const ComparisonTable& table);
std::string to_json(const SweepResult& result);
std::string to_csv(const SweepResult& result);
std::string to_json(const InspectReport& report);
std::string to_json(const AgreementReport& report);

// Every command writes one of these next to its outputs; the fields are
// enough to re-run the experiment bit-identically.
struct Manifest {
  std::string command;
  std::string config_json = "{}";  // resolved configuration, JSON text
  std::vector<std::uint64_t> seeds;
  std::uint64_t dataset_hash = 0;  // fnv1a64 of the dataset in JSONL form
  std::string version;
};

void write_manifest(const std::filesystem::path& dir, const Manifest& manifest);

}  // namespace vars
