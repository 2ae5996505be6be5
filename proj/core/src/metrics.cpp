#include "vars/metrics.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "vars/errors.hpp"

namespace vars {

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::int64_t n) {
  if (truth >= k || predicted >= k)
    throw ContractError("ConfusionMatrix::add: class index out of range (k=" +
                        std::to_string(k) + ")");
  counts[truth * k + predicted] += n;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (std::int64_t c : counts) t += c;
  return t;
}

std::int64_t ConfusionMatrix::row_total(std::size_t truth) const {
  std::int64_t t = 0;
  for (std::size_t j = 0; j < k; ++j) t += at(truth, j);
  return t;
}

double accuracy(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.total();
  if (total == 0) throw ContractError("accuracy: empty confusion matrix");
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < cm.k; ++i) correct += cm.at(i, i);
  return static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<double> per_class_recall(const ConfusionMatrix& cm) {
  std::vector<double> recall(cm.k, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < cm.k; ++i) {
    const std::int64_t positives = cm.row_total(i);
    if (positives > 0)
      recall[i] = static_cast<double>(cm.at(i, i)) / static_cast<double>(positives);
  }
  return recall;
}

double balanced_accuracy(const ConfusionMatrix& cm) {
  const std::vector<double> recall = per_class_recall(cm);
  double sum = 0.0;
  std::size_t present = 0;
  for (double r : recall) {
    if (!std::isnan(r)) {
      sum += r;
      ++present;
    }
  }
  if (present == 0)
    throw ContractError("balanced_accuracy: no class has positive support");
  return sum / static_cast<double>(present);
}

MetricsReport make_report(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.accuracy = accuracy(cm);
  r.balanced_accuracy = balanced_accuracy(cm);
  r.per_class_recall = per_class_recall(cm);
  r.n_samples = static_cast<std::size_t>(cm.total());
  r.confusion = cm;
  return r;
}

std::string to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["accuracy"] = report.accuracy;
  j["balanced_accuracy"] = report.balanced_accuracy;
  nlohmann::ordered_json recall = nlohmann::ordered_json::array();
  for (double r : report.per_class_recall) {
    if (std::isnan(r))
      recall.push_back(nullptr);
    else
      recall.push_back(r);
  }
  j["per_class_recall"] = std::move(recall);
  nlohmann::ordered_json confusion = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.confusion.k; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < report.confusion.k; ++c)
      row.push_back(report.confusion.at(i, c));
    confusion.push_back(std::move(row));
  }
  j["confusion"] = std::move(confusion);
  j["n_samples"] = report.n_samples;
  return j.dump(2);
}

}  // namespace vars
