#include "vars/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "vars/errors.hpp"
#include "vars/rng.hpp"
#include "vars/version.hpp"

namespace vars {

ExperimentProtocol synthetic_protocol() {
  ExperimentProtocol p;
  p.model.encoder = EncoderKind::mlp;
  p.model.in_dim = 16;
  p.model.feature_dim = 16;
  p.model.encoder_hidden = 32;
  p.model.head_hidden = 16;
  p.model.aggregation = AggregationKind::attention;
  p.model.attention_init = WeightInit::identity_matrix;
  p.train.lr0 = 2e-3;
  p.train.decay_factor = 1.0;  // constant rate; from-scratch training needs no decay here
  p.train.decay_every = 3;
  p.train.batch_size = 6;
  p.train.max_epochs = 30;
  return p;
}

EvalReports evaluate_metrics(const VarsModel& model, const Dataset& test) {
  ConfusionMatrix foul_cm(kFoulClasses);
  ConfusionMatrix off_cm(kSeverityClasses);
  for (const MultiViewSample& s : test) {
    const Prediction p = forward(model, s.views);
    foul_cm.add(static_cast<std::size_t>(s.foul_label),
                static_cast<std::size_t>(p.foul_class));
    off_cm.add(static_cast<std::size_t>(s.off_label),
               static_cast<std::size_t>(p.off_class));
  }
  return {make_report(foul_cm), make_report(off_cm)};
}

namespace {

// Trains one model per the protocol and returns metrics cells on `test`.
ComparisonCell train_and_eval(const Split& split, AggregationKind kind,
                              std::uint64_t seed, const ExperimentProtocol& protocol) {
  ModelConfig mc = protocol.model;
  mc.aggregation = kind;
  TrainConfig tc = protocol.train;
  tc.seed = seed;
  const VarsModel initial = VarsModel::init(mc, seed);
  const TrainResult trained = train(initial, split.train, split.val, tc);
  const EvalReports reports = evaluate_metrics(trained.model, split.test);
  ComparisonCell cell;
  cell.foul_accuracy = reports.foul.accuracy;
  cell.foul_balanced_accuracy = reports.foul.balanced_accuracy;
  cell.off_accuracy = reports.off.accuracy;
  cell.off_balanced_accuracy = reports.off.balanced_accuracy;
  return cell;
}

double population_std(std::span<const double> xs, double mean) {
  if (xs.empty()) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

double mean_of(std::span<const double> xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

}  // namespace

ComparisonTable run_comparison(const Split& split, std::span<const AggregationKind> kinds,
                               std::span<const std::uint64_t> seeds,
                               const ExperimentProtocol& protocol) {
  if (kinds.empty() || seeds.empty())
    throw ContractError("run_comparison: need at least one kind and one seed");
  ComparisonTable table;
  table.seeds.assign(seeds.begin(), seeds.end());
  for (AggregationKind kind : kinds) {
    ComparisonRow row;
    row.encoder_tag = to_string(protocol.model.encoder);
    row.kind = kind;
    for (std::uint64_t seed : seeds)
      row.per_seed.push_back(train_and_eval(split, kind, seed, protocol));
    const std::size_t n = row.per_seed.size();
    for (const ComparisonCell& c : row.per_seed) {
      row.mean.foul_accuracy += c.foul_accuracy / static_cast<double>(n);
      row.mean.foul_balanced_accuracy += c.foul_balanced_accuracy / static_cast<double>(n);
      row.mean.off_accuracy += c.off_accuracy / static_cast<double>(n);
      row.mean.off_balanced_accuracy += c.off_balanced_accuracy / static_cast<double>(n);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

SweepResult run_sweep(const Split& split, std::span<const double> fractions, int repeats,
                      const ExperimentProtocol& protocol, std::uint64_t seed,
                      int threads) {
  if (repeats < 1) throw ContractError("run_sweep: repeats must be >= 1");
  for (double f : fractions)
    if (f < 0.0 || f > 1.0) throw ContractError("run_sweep: fractions must lie in [0, 1]");

  SweepResult result;
  result.repeats = repeats;
  result.points.resize(fractions.size());

  struct Job {
    std::size_t fraction_index;
    int repeat;
  };
  std::vector<Job> jobs;
  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    result.points[fi].fraction = fractions[fi];
    if (fractions[fi] == 0.0) continue;  // baseline point, no training
    result.points[fi].foul_accuracies.resize(static_cast<std::size_t>(repeats));
    result.points[fi].off_accuracies.resize(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) jobs.push_back({fi, r});
  }

  auto run_job = [&](const Job& job) {
    const std::uint64_t job_seed =
        Rng::mix(seed, job.fraction_index * 1009 + static_cast<std::uint64_t>(job.repeat) + 1);
    const Dataset subset =
        subsample(split.train, fractions[job.fraction_index], Rng::mix(job_seed, 2));
    ModelConfig mc = protocol.model;
    TrainConfig tc = protocol.train;
    tc.seed = Rng::mix(job_seed, 1);
    const VarsModel initial = VarsModel::init(mc, tc.seed);
    const TrainResult trained = train(initial, subset, split.val, tc);
    const auto [foul_acc, off_acc] = accuracy_on(trained.model, split.test);
    result.points[job.fraction_index].foul_accuracies[static_cast<std::size_t>(job.repeat)] =
        foul_acc;
    result.points[job.fraction_index].off_accuracies[static_cast<std::size_t>(job.repeat)] =
        off_acc;
  };

  if (threads <= 1) {
    for (const Job& job : jobs) run_job(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(threads, static_cast<int>(jobs.size()));
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          run_job(jobs[i]);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  for (SweepPoint& point : result.points) {
    if (point.fraction == 0.0) {
      point.foul_mean = result.random_foul;
      point.off_mean = result.random_off;
      point.foul_std = 0.0;
      point.off_std = 0.0;
      continue;
    }
    point.foul_mean = mean_of(point.foul_accuracies);
    point.off_mean = mean_of(point.off_accuracies);
    point.foul_std = population_std(point.foul_accuracies, point.foul_mean);
    point.off_std = population_std(point.off_accuracies, point.off_mean);
  }
  return result;
}

InspectReport inspect_action(const VarsModel& model, const MultiViewSample& sample) {
  if (model.config.aggregation != AggregationKind::attention)
    throw ConfigError("inspect_action: model does not use attention aggregation");
  InspectReport report;
  report.action_id = sample.action_id;
  report.prediction = forward(model, sample.views);
  const Vector& weights = report.prediction.attention->values;
  report.attention_percent.resize(weights.len());
  for (std::size_t i = 0; i < weights.len(); ++i)
    report.attention_percent[i] = 100.0 * weights[i];
  report.view_ranking.resize(weights.len());
  for (std::size_t i = 0; i < weights.len(); ++i) report.view_ranking[i] = i;
  std::stable_sort(report.view_ranking.begin(), report.view_ranking.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
  report.foul_confidence = softmax(report.prediction.foul_logits);
  report.off_confidence = softmax(report.prediction.off_logits);
  report.foul_name = foul_type_names()[static_cast<std::size_t>(report.prediction.foul_class)];
  report.off_name = severity_names()[static_cast<std::size_t>(report.prediction.off_class)];
  return report;
}

AgreementReport run_agreement(const RaterTable& table) {
  AgreementReport report;
  report.rater_names = table.rater_names;
  report.rater_accuracies = rater_accuracy(table);
  std::vector<std::string> groups =
      table.has_groups() ? table.group_names() : std::vector<std::string>{""};
  for (const std::string& g : groups) {
    GroupAgreement ga;
    ga.group = g.empty() ? "all" : g;
    ga.kappa = average_kappa(table, g);
    ga.consensus_percent = consensus_histogram(table, g);
    report.groups.push_back(std::move(ga));
  }
  return report;
}

// ---- serialization ---------------------------------------------------------

namespace {
using json = nlohmann::ordered_json;
}

std::string to_json(const ComparisonTable& table) {
  json j;
  j["seeds"] = table.seeds;
  json rows = json::array();
  for (const ComparisonRow& row : table.rows) {
    json r;
    r["encoder"] = row.encoder_tag;
    r["pooling"] = to_string(row.kind);
    r["foul_accuracy"] = row.mean.foul_accuracy;
    r["foul_balanced_accuracy"] = row.mean.foul_balanced_accuracy;
    r["off_accuracy"] = row.mean.off_accuracy;
    r["off_balanced_accuracy"] = row.mean.off_balanced_accuracy;
    json per_seed = json::array();
    for (const ComparisonCell& c : row.per_seed) {
      json cell;
      cell["foul_accuracy"] = c.foul_accuracy;
      cell["foul_balanced_accuracy"] = c.foul_balanced_accuracy;
      cell["off_accuracy"] = c.off_accuracy;
      cell["off_balanced_accuracy"] = c.off_balanced_accuracy;
      per_seed.push_back(std::move(cell));
    }
    r["per_seed"] = std::move(per_seed);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j.dump(2);
}

std::string to_csv(const ComparisonTable& table) {
  std::string out =
      "encoder,pooling,foul_accuracy,foul_balanced_accuracy,off_accuracy,off_balanced_accuracy\n";
  char line[256];
  for (const ComparisonRow& row : table.rows) {
    std::snprintf(line, sizeof line, "%s,%s,%.17g,%.17g,%.17g,%.17g\n",
                  row.encoder_tag.c_str(), to_string(row.kind), row.mean.foul_accuracy,
                  row.mean.foul_balanced_accuracy, row.mean.off_accuracy,
                  row.mean.off_balanced_accuracy);
    out += line;
  }
  return out;
}

std::string to_json(const SweepResult& result) {
  json j;
  j["repeats"] = result.repeats;
  j["random_baseline"] = {{"foul", result.random_foul}, {"off", result.random_off}};
  json points = json::array();
  for (const SweepPoint& p : result.points) {
    json pj;
    pj["fraction"] = p.fraction;
    pj["foul_mean"] = p.foul_mean;
    pj["foul_std"] = p.foul_std;
    pj["off_mean"] = p.off_mean;
    pj["off_std"] = p.off_std;
    pj["foul_accuracies"] = p.foul_accuracies;
    pj["off_accuracies"] = p.off_accuracies;
    points.push_back(std::move(pj));
  }
  j["points"] = std::move(points);
  return j.dump(2);
}

std::string to_csv(const SweepResult& result) {
  std::string out = "fraction,foul_mean,foul_std,off_mean,off_std\n";
  char line[192];
  for (const SweepPoint& p : result.points) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.fraction,
                  p.foul_mean, p.foul_std, p.off_mean, p.off_std);
    out += line;
  }
  return out;
}

std::string to_json(const InspectReport& report) {
  json j;
  j["action_id"] = report.action_id;
  j["attention_percent"] = report.attention_percent;
  j["view_ranking"] = report.view_ranking;
  j["foul"] = {{"class", report.prediction.foul_class},
               {"label", report.foul_name},
               {"confidence", report.foul_confidence.data}};
  j["off"] = {{"class", report.prediction.off_class},
              {"label", report.off_name},
              {"confidence", report.off_confidence.data}};
  return j.dump(2);
}

std::string to_json(const AgreementReport& report) {
  json j;
  json raters = json::array();
  for (std::size_t r = 0; r < report.rater_names.size(); ++r) {
    json rj;
    rj["name"] = report.rater_names[r];
    rj["accuracy"] = report.rater_accuracies[r];
    raters.push_back(std::move(rj));
  }
  j["raters"] = std::move(raters);
  json groups = json::array();
  for (const GroupAgreement& g : report.groups) {
    json gj;
    gj["group"] = g.group;
    gj["average_kappa"] = g.kappa.average;
    gj["pairs_used"] = g.kappa.pairs_used;
    gj["pairs_undefined"] = g.kappa.pairs_undefined;
    gj["consensus_percent"] = g.consensus_percent;
    groups.push_back(std::move(gj));
  }
  j["groups"] = std::move(groups);
  return j.dump(2);
}

void write_manifest(const std::filesystem::path& dir, const Manifest& manifest) {
  std::filesystem::create_directories(dir);
  json j;
  j["command"] = manifest.command;
  j["version"] = manifest.version.empty() ? kVersion : manifest.version;
  j["seeds"] = manifest.seeds;
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(manifest.dataset_hash));
  j["dataset_hash"] = hex;
  try {
    j["config"] = json::parse(manifest.config_json);
  } catch (const nlohmann::json::exception&) {
    j["config"] = manifest.config_json;
  }
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw ParseError("cannot write manifest in " + dir.string());
  out << j.dump(2) << '\n';
}

}  // namespace vars
