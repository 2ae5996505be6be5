// vars: multi-view foul classification toolkit.
//
// Subcommands: gen-synthetic, train, eval, compare, sweep, inspect, agree,
// gradcheck. Every command accepts --seed and --out; experiment commands write
// a manifest.json next to their outputs.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vars/errors.hpp"
#include "vars/experiments.hpp"
#include "vars/rng.hpp"
#include "vars/serialize.hpp"
#include "vars/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw vars::ParseError("cannot open: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vars::ParseError("cannot write: " + path.string());
  out << text;
}

struct ConfigFile {
  json model = json::object();
  json train = json::object();
  json synthetic = json::object();
};

ConfigFile load_config(const std::string& path) {
  ConfigFile cfg;
  if (path.empty()) return cfg;
  json j = json::parse(slurp(path));
  if (j.contains("model")) cfg.model = j["model"];
  if (j.contains("train")) cfg.train = j["train"];
  if (j.contains("synthetic")) cfg.synthetic = j["synthetic"];
  return cfg;
}

vars::ModelConfig resolve_model(const ConfigFile& cfg, vars::ModelConfig defaults) {
  return vars::model_config_from_json(cfg.model.dump(), defaults);
}

vars::TrainConfig resolve_train(const ConfigFile& cfg, vars::TrainConfig defaults) {
  return vars::train_config_from_json(cfg.train.dump(), defaults);
}

vars::SyntheticSpec resolve_synthetic(const ConfigFile& cfg, vars::SyntheticSpec defaults) {
  return vars::synthetic_spec_from_json(cfg.synthetic.dump(), defaults);
}

std::string protocol_json(const vars::ModelConfig& mc, const vars::TrainConfig& tc) {
  json j;
  j["model"] = json::parse(vars::to_json_text(mc));
  j["train"] = json::parse(vars::to_json_text(tc));
  return j.dump();
}

// Synthetic 600/120/200 split used by compare and sweep when no files are given.
vars::Split default_synthetic_split(std::uint64_t seed, std::uint64_t* hash_out) {
  vars::SyntheticSpec spec;
  spec.n_samples = 920;
  spec.seed = seed;
  const vars::SyntheticData data = vars::generate_synthetic(spec);
  if (hash_out) *hash_out = vars::fnv1a64(vars::dataset_to_jsonl(data.samples));
  return vars::split_dataset(data.samples, 600, 120, 200);
}

vars::Split load_split(const std::string& train_path, const std::string& val_path,
                       const std::string& test_path, std::uint64_t* hash_out) {
  vars::Split split;
  split.train = vars::load_dataset(train_path);
  split.val = vars::load_dataset(val_path);
  split.test = vars::load_dataset(test_path);
  if (hash_out)
    *hash_out = vars::fnv1a64(vars::dataset_to_jsonl(split.train) +
                              vars::dataset_to_jsonl(split.val) +
                              vars::dataset_to_jsonl(split.test));
  return split;
}

int cmd_gen_synthetic(const vars::SyntheticSpec& spec, const fs::path& out_dir) {
  const vars::SyntheticData data = vars::generate_synthetic(spec);
  fs::create_directories(out_dir);
  vars::save_dataset(out_dir / "dataset.jsonl", data.samples);
  vars::save_informative_mask(out_dir / "informative_mask.json", data);

  vars::Manifest manifest;
  manifest.command = "gen-synthetic";
  manifest.config_json = vars::to_json_text(spec);
  manifest.seeds = {spec.seed};
  manifest.dataset_hash = vars::fnv1a64(vars::dataset_to_jsonl(data.samples));
  vars::write_manifest(out_dir, manifest);

  std::printf("wrote %zu samples to %s\n", data.samples.size(),
              (out_dir / "dataset.jsonl").c_str());
  return 0;
}

int cmd_train(const vars::ModelConfig& mc, const vars::TrainConfig& tc,
              const std::string& data_path, const std::string& val_path,
              double val_fraction, const fs::path& out_dir) {
  vars::Dataset train_set = vars::load_dataset(data_path);
  vars::Dataset val_set;
  if (!val_path.empty()) {
    val_set = vars::load_dataset(val_path);
  } else {
    // deterministic tail split of the training file
    const std::size_t n_val =
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     std::llround(val_fraction * train_set.size())));
    if (n_val >= train_set.size())
      throw vars::ConfigError("train: --val-fraction leaves no training data");
    val_set.assign(train_set.end() - static_cast<std::ptrdiff_t>(n_val), train_set.end());
    train_set.resize(train_set.size() - n_val);
  }

  const vars::VarsModel initial = vars::VarsModel::init(mc, tc.seed);
  const vars::TrainResult result = vars::train(initial, train_set, val_set, tc);

  fs::create_directories(out_dir);
  vars::save_checkpoint(out_dir / "checkpoint.json",
                        {result.model, tc, result.history, result.best_epoch});

  std::string history_csv =
      "epoch,lr,train_loss,val_loss,val_foul_accuracy,val_off_accuracy\n";
  char line[192];
  for (const vars::EpochStats& e : result.history) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.epoch, e.lr,
                  e.train_loss, e.val_loss, e.val_foul_accuracy, e.val_off_accuracy);
    history_csv += line;
  }
  spit(out_dir / "history.csv", history_csv);

  vars::Manifest manifest;
  manifest.command = "train";
  manifest.config_json = protocol_json(mc, tc);
  manifest.seeds = {tc.seed};
  manifest.dataset_hash = vars::fnv1a64(vars::dataset_to_jsonl(train_set));
  vars::write_manifest(out_dir, manifest);

  std::printf("best epoch %d, validation offence accuracy %.4f\n", result.best_epoch,
              result.best_val_off_accuracy);
  std::printf("checkpoint written to %s\n", (out_dir / "checkpoint.json").c_str());
  return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_path,
             const fs::path& out_dir) {
  const vars::Checkpoint ckpt = vars::load_checkpoint(checkpoint_path);
  const vars::Dataset test = vars::load_dataset(data_path);
  const vars::EvalReports reports = vars::evaluate_metrics(ckpt.model, test);

  fs::create_directories(out_dir);
  spit(out_dir / "metrics_foul.json", vars::to_json(reports.foul));
  spit(out_dir / "metrics_off.json", vars::to_json(reports.off));

  vars::Manifest manifest;
  manifest.command = "eval";
  manifest.config_json = vars::to_json_text(ckpt.model.config);
  manifest.seeds = {ckpt.train_config.seed};
  manifest.dataset_hash = vars::fnv1a64(vars::dataset_to_jsonl(test));
  vars::write_manifest(out_dir, manifest);

  std::printf("foul:    accuracy %.4f, balanced accuracy %.4f\n", reports.foul.accuracy,
              reports.foul.balanced_accuracy);
  std::printf("offence: accuracy %.4f, balanced accuracy %.4f\n", reports.off.accuracy,
              reports.off.balanced_accuracy);
  return 0;
}

int cmd_compare(const vars::ExperimentProtocol& protocol, const vars::Split& split,
                std::uint64_t dataset_hash, std::size_t n_seeds, std::uint64_t seed,
                const std::vector<std::string>& kind_names, const fs::path& out_dir) {
  std::vector<vars::AggregationKind> kinds;
  for (const std::string& name : kind_names)
    kinds.push_back(vars::aggregation_kind_from_string(name));
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < n_seeds; ++i) seeds.push_back(seed + i);

  const vars::ComparisonTable table = vars::run_comparison(split, kinds, seeds, protocol);

  fs::create_directories(out_dir);
  spit(out_dir / "comparison.csv", vars::to_csv(table));
  spit(out_dir / "comparison.json", vars::to_json(table));

  vars::Manifest manifest;
  manifest.command = "compare";
  manifest.config_json = protocol_json(protocol.model, protocol.train);
  manifest.seeds = seeds;
  manifest.dataset_hash = dataset_hash;
  vars::write_manifest(out_dir, manifest);

  std::printf("%-10s %-10s %8s %8s %8s %8s\n", "encoder", "pooling", "foulAcc", "foulBA",
              "offAcc", "offBA");
  for (const vars::ComparisonRow& row : table.rows)
    std::printf("%-10s %-10s %8.4f %8.4f %8.4f %8.4f\n", row.encoder_tag.c_str(),
                vars::to_string(row.kind), row.mean.foul_accuracy,
                row.mean.foul_balanced_accuracy, row.mean.off_accuracy,
                row.mean.off_balanced_accuracy);
  std::printf("mean over %zu seed(s); table written to %s\n", seeds.size(),
              (out_dir / "comparison.csv").c_str());
  return 0;
}

int cmd_sweep(const vars::ExperimentProtocol& protocol, const vars::Split& split,
              std::uint64_t dataset_hash, const std::vector<double>& fractions,
              int repeats, int threads, std::uint64_t seed, const fs::path& out_dir) {
  const vars::SweepResult result =
      vars::run_sweep(split, fractions, repeats, protocol, seed, threads);

  fs::create_directories(out_dir);
  spit(out_dir / "sweep.csv", vars::to_csv(result));
  spit(out_dir / "sweep.json", vars::to_json(result));

  vars::Manifest manifest;
  manifest.command = "sweep";
  manifest.config_json = protocol_json(protocol.model, protocol.train);
  manifest.seeds = {seed};
  manifest.dataset_hash = dataset_hash;
  vars::write_manifest(out_dir, manifest);

  for (const vars::SweepPoint& p : result.points)
    std::printf("fraction %4.2f: foul %.4f +- %.4f, offence %.4f +- %.4f\n", p.fraction,
                p.foul_mean, p.foul_std, p.off_mean, p.off_std);
  std::printf("sweep written to %s\n", (out_dir / "sweep.csv").c_str());
  return 0;
}

int cmd_inspect(const std::string& checkpoint_path, const std::string& data_path,
                const std::string& action_id, int index, const fs::path& out_dir) {
  const vars::Checkpoint ckpt = vars::load_checkpoint(checkpoint_path);
  const vars::Dataset data = vars::load_dataset(data_path);
  if (data.empty()) throw vars::ContractError("inspect: dataset is empty");

  const vars::MultiViewSample* sample = nullptr;
  if (!action_id.empty()) {
    for (const auto& s : data)
      if (s.action_id == action_id) sample = &s;
    if (sample == nullptr)
      throw vars::ConfigError("inspect: no action with id '" + action_id + "'");
  } else {
    if (index < 0 || static_cast<std::size_t>(index) >= data.size())
      throw vars::ConfigError("inspect: --index out of range");
    sample = &data[static_cast<std::size_t>(index)];
  }

  const vars::InspectReport report = vars::inspect_action(ckpt.model, *sample);
  fs::create_directories(out_dir);
  spit(out_dir / "inspect.json", vars::to_json(report));

  std::printf("action %s\n", report.action_id.c_str());
  for (std::size_t rank = 0; rank < report.view_ranking.size(); ++rank) {
    const std::size_t v = report.view_ranking[rank];
    std::printf("  view %zu: %6.2f%% attention\n", v + 1, report.attention_percent[v]);
  }
  std::printf("  foul:    %s (%.1f%%)\n", report.foul_name.c_str(),
              100.0 * report.foul_confidence[static_cast<std::size_t>(
                          report.prediction.foul_class)]);
  std::printf("  offence: %s (%.1f%%)\n", report.off_name.c_str(),
              100.0 * report.off_confidence[static_cast<std::size_t>(
                          report.prediction.off_class)]);
  return 0;
}

int cmd_agree(const std::string& table_path, const std::string& task,
              const std::string& labels_csv, const fs::path& out_dir) {
  std::vector<std::string> labels;
  if (!labels_csv.empty()) {
    std::stringstream ss(labels_csv);
    std::string item;
    while (std::getline(ss, item, ',')) labels.push_back(item);
  } else {
    labels = vars::task_labels(task);
  }
  const vars::RaterTable table = vars::load_rater_table(table_path, labels);
  const vars::AgreementReport report = vars::run_agreement(table);

  fs::create_directories(out_dir);
  spit(out_dir / "agreement.json", vars::to_json(report));

  vars::Manifest manifest;
  manifest.command = "agree";
  manifest.config_json = "{\"task\": \"" + (labels_csv.empty() ? task : "custom") + "\"}";
  manifest.dataset_hash = vars::fnv1a64(slurp(table_path));
  vars::write_manifest(out_dir, manifest);

  for (const vars::GroupAgreement& g : report.groups) {
    std::printf("group %-12s average kappa %.4f over %zu pairs", g.group.c_str(),
                g.kappa.average, g.kappa.pairs_used);
    if (g.kappa.pairs_undefined > 0)
      std::printf(" (warning: %zu undefined pairs excluded)", g.kappa.pairs_undefined);
    std::printf("\n  consensus:");
    for (std::size_t i = 0; i < g.consensus_percent.size(); ++i)
      std::printf(" %zu->%.1f%%", i + 1, g.consensus_percent[i]);
    std::printf("\n");
  }
  return 0;
}

int cmd_gradcheck(int n_seeds, const std::vector<std::size_t>& dims,
                  const fs::path& out_dir) {
  double worst = 0.0;
  std::size_t checked = 0;
  for (int s = 0; s < n_seeds; ++s) {
    vars::Rng rng(static_cast<std::uint64_t>(s) * 6151 + 17);
    const std::size_t n = 1 + rng.below(4);
    const std::size_t d = dims[static_cast<std::size_t>(s) % dims.size()];

    vars::ModelConfig mc;
    mc.encoder = vars::EncoderKind::mlp;
    mc.in_dim = d + 1;
    mc.feature_dim = d;
    mc.encoder_hidden = d + 2;
    mc.head_hidden = d;
    mc.aggregation = vars::AggregationKind::attention;
    vars::VarsModel model = vars::VarsModel::init(mc, static_cast<std::uint64_t>(s));

    vars::MultiViewSample sample;
    sample.action_id = "gradcheck";
    sample.views = vars::Matrix(n, d + 1);
    for (double& x : sample.views.data) x = rng.uniform(-1.0, 1.0);
    sample.foul_label = static_cast<int>(rng.below(8));
    sample.off_label = static_cast<int>(rng.below(4));

    const vars::BatchGrads analytic =
        vars::batch_loss_and_grads(model, std::span(&sample, 1));
    auto params = model.parameters();
    for (std::size_t p = 0; p < params.size(); ++p) {
      vars::Matrix& value = *params[p].value;
      for (std::size_t i = 0; i < value.data.size(); ++i) {
        const double original = value.data[i];
        const double h = 1e-6;
        value.data[i] = original + h;
        const double up = vars::multitask_loss(vars::forward(model, sample.views),
                                               sample.foul_label, sample.off_label);
        value.data[i] = original - h;
        const double down = vars::multitask_loss(vars::forward(model, sample.views),
                                                 sample.foul_label, sample.off_label);
        value.data[i] = original;
        const double fd = (up - down) / (2.0 * h);
        const double analytic_g = analytic.grads[p].data[i];
        const double denom =
            std::max({std::abs(analytic_g), std::abs(fd), 1e-3});
        worst = std::max(worst, std::abs(analytic_g - fd) / denom);
        ++checked;
      }
    }
  }
  std::printf("gradcheck: %zu partial derivatives over %d seeds, max relative error %.3g\n",
              checked, n_seeds, worst);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    json j;
    j["checked"] = checked;
    j["seeds"] = n_seeds;
    j["max_relative_error"] = worst;
    j["threshold"] = 1e-5;
    spit(out_dir / "gradcheck.json", j.dump(2) + "\n");
  }
  return worst < 1e-5 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vars: multi-view foul classification toolkit"};
  app.set_version_flag("--version", std::string("vars ") + vars::kVersion);
  app.require_subcommand(1);

  std::string config_path;

  // ---- gen-synthetic ----
  auto* gen = app.add_subcommand("gen-synthetic", "generate a planted-structure dataset");
  std::uint64_t gen_seed = 0;
  std::string gen_out = "runs/gen-synthetic";
  std::size_t gen_n = 0, gen_views = 0, gen_informative = 0, gen_dim = 0;
  double gen_sep = -1.0, gen_noise = -1.0;
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("-n,--samples", gen_n, "number of samples");
  gen->add_option("--views", gen_views, "views per sample");
  gen->add_option("--informative", gen_informative, "informative views per sample");
  gen->add_option("--dim", gen_dim, "feature dimension");
  gen->add_option("--separation", gen_sep, "class mean separation");
  gen->add_option("--noise", gen_noise, "informative view noise sigma");

  // ---- train ----
  auto* tr = app.add_subcommand("train", "train a model on a dataset file");
  std::string tr_data, tr_val;
  double tr_val_fraction = 0.1;
  std::string tr_out = "runs/train";
  std::uint64_t tr_seed = 0;
  std::string tr_aggregation, tr_encoder;
  double tr_lr = -1.0;
  int tr_epochs = -1, tr_batch = -1;
  tr->add_option("--data", tr_data, "training dataset (JSON lines)")->required();
  tr->add_option("--val", tr_val, "validation dataset; defaults to a tail split of --data");
  tr->add_option("--val-fraction", tr_val_fraction, "tail fraction for validation");
  tr->add_option("--seed", tr_seed, "training seed");
  tr->add_option("--out", tr_out, "output directory");
  tr->add_option("--aggregation", tr_aggregation, "mean | max | attention");
  tr->add_option("--encoder", tr_encoder, "identity | linear | mlp");
  tr->add_option("--lr", tr_lr, "initial learning rate");
  tr->add_option("--epochs", tr_epochs, "training epochs");
  tr->add_option("--batch-size", tr_batch, "minibatch size");

  // ---- eval ----
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  std::string ev_ckpt, ev_data, ev_out = "runs/eval";
  std::uint64_t ev_seed = 0;
  ev->add_option("--checkpoint", ev_ckpt, "checkpoint file")->required();
  ev->add_option("--data", ev_data, "evaluation dataset")->required();
  ev->add_option("--out", ev_out, "output directory");
  ev->add_option("--seed", ev_seed, "unused; accepted for uniformity");

  // ---- compare ----
  auto* cp = app.add_subcommand("compare", "pooling comparison on shared splits");
  std::string cp_train, cp_val, cp_test, cp_out = "runs/compare";
  std::size_t cp_seeds = 5;
  std::uint64_t cp_seed = 1;
  std::vector<std::string> cp_kinds = {"mean", "max", "attention"};
  cp->add_option("--train", cp_train, "training split (omit for the default synthetic)");
  cp->add_option("--val", cp_val, "validation split");
  cp->add_option("--test", cp_test, "test split");
  cp->add_option("--seeds", cp_seeds, "number of seeds to average");
  cp->add_option("--seed", cp_seed, "first seed");
  cp->add_option("--kinds", cp_kinds, "pooling kinds to compare")->delimiter(',');
  cp->add_option("--out", cp_out, "output directory");

  // ---- sweep ----
  auto* sw = app.add_subcommand("sweep", "dataset-size sensitivity sweep");
  std::string sw_train, sw_val, sw_test, sw_out = "runs/sweep";
  std::vector<double> sw_fractions = {0.0, 0.25, 0.5, 0.75, 1.0};
  int sw_repeats = 10, sw_threads = 1;
  std::uint64_t sw_seed = 1;
  sw->add_option("--train", sw_train, "training split (omit for the default synthetic)");
  sw->add_option("--val", sw_val, "validation split");
  sw->add_option("--test", sw_test, "test split");
  sw->add_option("--fractions", sw_fractions, "training-set fractions")->delimiter(',');
  sw->add_option("--repeats", sw_repeats, "independent repeats per fraction");
  sw->add_option("--threads", sw_threads, "parallel training runs");
  sw->add_option("--seed", sw_seed, "sweep seed");
  sw->add_option("--out", sw_out, "output directory");

  // ---- inspect ----
  auto* in = app.add_subcommand("inspect", "per-view attention report for one action");
  std::string in_ckpt, in_data, in_action, in_out = "runs/inspect";
  int in_index = 0;
  std::uint64_t in_seed = 0;
  in->add_option("--checkpoint", in_ckpt, "checkpoint file")->required();
  in->add_option("--data", in_data, "dataset with the action")->required();
  in->add_option("--action", in_action, "action id to inspect");
  in->add_option("--index", in_index, "sample index when no --action is given");
  in->add_option("--out", in_out, "output directory");
  in->add_option("--seed", in_seed, "unused; accepted for uniformity");

  // ---- agree ----
  auto* ag = app.add_subcommand("agree", "inter-rater agreement analysis");
  std::string ag_table, ag_task = "offence_severity", ag_labels, ag_out = "runs/agree";
  std::uint64_t ag_seed = 0;
  ag->add_option("--table", ag_table, "rater table CSV")->required();
  ag->add_option("--task", ag_task, "foul_type | offence_severity");
  ag->add_option("--labels", ag_labels, "explicit comma-separated label set");
  ag->add_option("--out", ag_out, "output directory");
  ag->add_option("--seed", ag_seed, "unused; accepted for uniformity");

  // ---- gradcheck ----
  auto* gc = app.add_subcommand("gradcheck", "finite-difference check of the full model");
  int gc_seeds = 20;
  std::vector<std::size_t> gc_dims = {2, 8, 16};
  std::string gc_out;
  gc->add_option("--seeds", gc_seeds, "number of random model/sample draws");
  gc->add_option("--dims", gc_dims, "feature dimensions to cycle through")->delimiter(',');
  gc->add_option("--out", gc_out, "optional output directory");

  for (CLI::App* sub : app.get_subcommands({}))
    sub->add_option("--config", config_path,
                    "JSON config file (model/train/synthetic sections)");

  CLI11_PARSE(app, argc, argv);

  try {
    const ConfigFile cfg = load_config(config_path);

    if (gen->parsed()) {
      vars::SyntheticSpec spec = resolve_synthetic(cfg, {});
      if (gen->count("--seed")) spec.seed = gen_seed;
      if (gen->count("-n") || gen->count("--samples")) spec.n_samples = gen_n;
      if (gen->count("--views")) spec.views_per_sample = gen_views;
      if (gen->count("--informative")) spec.n_informative_views = gen_informative;
      if (gen->count("--dim")) spec.dim = gen_dim;
      if (gen->count("--separation")) spec.class_separation = gen_sep;
      if (gen->count("--noise")) spec.noise_sigma = gen_noise;
      return cmd_gen_synthetic(spec, gen_out);
    }
    if (tr->parsed()) {
      vars::ModelConfig mc = resolve_model(cfg, {});
      vars::TrainConfig tc = resolve_train(cfg, {});
      if (tr->count("--seed")) tc.seed = tr_seed;
      if (tr->count("--aggregation"))
        mc.aggregation = vars::aggregation_kind_from_string(tr_aggregation);
      if (tr->count("--encoder")) mc.encoder = vars::encoder_kind_from_string(tr_encoder);
      if (tr->count("--lr")) tc.lr0 = tr_lr;
      if (tr->count("--epochs")) tc.max_epochs = tr_epochs;
      if (tr->count("--batch-size")) tc.batch_size = tr_batch;
      return cmd_train(mc, tc, tr_data, tr_val, tr_val_fraction, tr_out);
    }
    if (ev->parsed()) return cmd_eval(ev_ckpt, ev_data, ev_out);
    if (cp->parsed()) {
      vars::ExperimentProtocol protocol = vars::synthetic_protocol();
      protocol.model = resolve_model(cfg, protocol.model);
      protocol.train = resolve_train(cfg, protocol.train);
      std::uint64_t hash = 0;
      const vars::Split split =
          cp_train.empty() ? default_synthetic_split(cp_seed, &hash)
                           : load_split(cp_train, cp_val, cp_test, &hash);
      return cmd_compare(protocol, split, hash, cp_seeds, cp_seed, cp_kinds, cp_out);
    }
    if (sw->parsed()) {
      vars::ExperimentProtocol protocol = vars::synthetic_protocol();
      protocol.model = resolve_model(cfg, protocol.model);
      protocol.train = resolve_train(cfg, protocol.train);
      std::uint64_t hash = 0;
      const vars::Split split =
          sw_train.empty() ? default_synthetic_split(sw_seed, &hash)
                           : load_split(sw_train, sw_val, sw_test, &hash);
      return cmd_sweep(protocol, split, hash, sw_fractions, sw_repeats, sw_threads,
                       sw_seed, sw_out);
    }
    if (in->parsed()) return cmd_inspect(in_ckpt, in_data, in_action, in_index, in_out);
    if (ag->parsed()) return cmd_agree(ag_table, ag_task, ag_labels, ag_out);
    if (gc->parsed()) return cmd_gradcheck(gc_seeds, gc_dims, gc_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
