#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vars {

// Square count table; rows are ground truth, columns are predictions.
struct ConfusionMatrix {
  std::size_t k = 0;
  std::vector<std::int64_t> counts;  // k * k, row-major

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes) : k(classes), counts(classes * classes, 0) {}

  void add(std::size_t truth, std::size_t predicted, std::int64_t n = 1);
  std::int64_t at(std::size_t truth, std::size_t predicted) const {
    return counts[truth * k + predicted];
  }
  std::int64_t total() const;
  std::int64_t row_total(std::size_t truth) const;
};

// trace / total
double accuracy(const ConfusionMatrix& cm);

// Mean per-class recall over the classes that actually occur (P_i > 0).
double balanced_accuracy(const ConfusionMatrix& cm);

// TP_i / P_i per class; NaN where the class has no positives.
std::vector<double> per_class_recall(const ConfusionMatrix& cm);

struct MetricsReport {
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  std::vector<double> per_class_recall;
  std::size_t n_samples = 0;
  ConfusionMatrix confusion;
};

MetricsReport make_report(const ConfusionMatrix& cm);

// JSON with keys: accuracy, balanced_accuracy, per_class_recall, confusion,
// n_samples. Recall of an absent class serializes as null.
std::string to_json(const MetricsReport& report);

}  // namespace vars
