#include "vars/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "vars/errors.hpp"
#include "vars/rng.hpp"

namespace vars {

const std::array<std::string, kFoulClasses>& foul_type_names() {
  static const std::array<std::string, kFoulClasses> names = {
      "Standing tackling", "Tackling", "High leg",  "Pushing",
      "Holding",           "Elbowing", "Challenge", "Dive/Simulation"};
  return names;
}

const std::array<std::string, kSeverityClasses>& severity_names() {
  static const std::array<std::string, kSeverityClasses> names = {
      "No offence", "Offence + No card", "Offence + Yellow card", "Offence + Red card"};
  return names;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

nlohmann::ordered_json sample_to_json(const MultiViewSample& s) {
  nlohmann::ordered_json j;
  j["action_id"] = s.action_id;
  j["foul"] = s.foul_label;
  j["off"] = s.off_label;
  nlohmann::ordered_json views = nlohmann::ordered_json::array();
  for (std::size_t v = 0; v < s.views.rows; ++v) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < s.views.cols; ++k) row.push_back(s.views.at(v, k));
    views.push_back(std::move(row));
  }
  j["views"] = std::move(views);
  return j;
}

}  // namespace

std::string dataset_to_jsonl(const Dataset& dataset) {
  std::string out;
  for (const MultiViewSample& s : dataset) {
    out += sample_to_json(s).dump();
    out += '\n';
  }
  return out;
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open for writing: " + path.string());
  out << dataset_to_jsonl(dataset);
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset file: " + path.string());
  const std::string fname = path.string();

  Dataset dataset;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    nlohmann::json j;
    MultiViewSample s;
    try {
      j = nlohmann::json::parse(line);
      if (!j.is_object() || !j.contains("action_id") || !j.contains("foul") ||
          !j.contains("off") || !j.contains("views"))
        throw ParseError(fname, line_no,
                         "record must have keys action_id, foul, off, views");
      s.action_id = j["action_id"].get<std::string>();
      s.foul_label = j["foul"].get<int>();
      s.off_label = j["off"].get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(fname, line_no, std::string("invalid record: ") + e.what());
    }
    if (s.foul_label < 0 || s.foul_label >= static_cast<int>(kFoulClasses))
      throw ParseError(fname, line_no,
                       "unknown foul label index " + std::to_string(s.foul_label));
    if (s.off_label < 0 || s.off_label >= static_cast<int>(kSeverityClasses))
      throw ParseError(fname, line_no,
                       "unknown offence-severity label index " + std::to_string(s.off_label));

    const auto& views = j["views"];
    if (!views.is_array() || views.empty())
      throw ParseError(fname, line_no, "views must be a non-empty array of rows");
    const std::size_t n = views.size();
    const std::size_t d = views[0].is_array() ? views[0].size() : 0;
    if (d == 0) throw ParseError(fname, line_no, "view rows must be non-empty arrays");
    if (dim == 0) dim = d;
    if (d != dim)
      throw ParseError(fname, line_no,
                       "feature dimension " + std::to_string(d) +
                           " differs from earlier records (" + std::to_string(dim) + ")");
    s.views = Matrix(n, d);
    for (std::size_t v = 0; v < n; ++v) {
      if (!views[v].is_array() || views[v].size() != d)
        throw ParseError(fname, line_no, "ragged view rows");
      for (std::size_t k = 0; k < d; ++k) {
        if (!views[v][k].is_number())
          throw ParseError(fname, line_no, "feature values must be numbers");
        s.views.at(v, k) = views[v][k].get<double>();
        if (!std::isfinite(s.views.at(v, k)))
          throw ParseError(fname, line_no, "non-finite feature value");
      }
    }
    dataset.push_back(std::move(s));
  }
  return dataset;
}

Dataset subsample(const Dataset& dataset, double fraction, std::uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0)
    throw ContractError("subsample: fraction must lie in [0, 1]");
  const std::size_t n = dataset.size();
  const std::size_t want =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (want == 0) return {};
  if (want == n) return dataset;

  // Per-class targets by largest remainder, so class counts stay within +-1
  // of fraction * class count and the total is exact.
  std::vector<std::vector<std::size_t>> by_class(kFoulClasses);
  for (std::size_t i = 0; i < n; ++i)
    by_class[static_cast<std::size_t>(dataset[i].foul_label)].push_back(i);

  std::vector<std::size_t> take(kFoulClasses, 0);
  std::vector<std::pair<double, std::size_t>> remainders;  // (-remainder, class)
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kFoulClasses; ++c) {
    const double exact = fraction * static_cast<double>(by_class[c].size());
    take[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += take[c];
    remainders.push_back({-(exact - std::floor(exact)), c});
  }
  std::sort(remainders.begin(), remainders.end());
  for (std::size_t i = 0; i < remainders.size() && assigned < want; ++i) {
    const std::size_t c = remainders[i].second;
    if (take[c] < by_class[c].size()) {
      ++take[c];
      ++assigned;
    }
  }
  // Rounding can leave a residue when some classes are exhausted.
  for (std::size_t c = 0; c < kFoulClasses && assigned < want; ++c) {
    while (take[c] < by_class[c].size() && assigned < want) {
      ++take[c];
      ++assigned;
    }
  }

  Rng rng(Rng::mix(seed, 0x5ab5a31eULL));
  std::vector<bool> chosen(n, false);
  for (std::size_t c = 0; c < kFoulClasses; ++c) {
    std::vector<std::size_t> pool = by_class[c];
    rng.shuffle(pool);
    for (std::size_t i = 0; i < take[c]; ++i) chosen[pool[i]] = true;
  }
  Dataset out;
  out.reserve(want);
  for (std::size_t i = 0; i < n; ++i)
    if (chosen[i]) out.push_back(dataset[i]);
  return out;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_informative_views < 1 || spec.n_informative_views > spec.views_per_sample)
    throw ConfigError("generate_synthetic: need 1 <= informative views <= views per sample");
  if (spec.dim == 0) throw ConfigError("generate_synthetic: dim must be positive");
  if (spec.foul_frequencies.size() != kFoulClasses ||
      spec.severity_frequencies.size() != kSeverityClasses)
    throw ConfigError("generate_synthetic: frequency vectors must have 8 and 4 entries");

  Rng rng(spec.seed);
  SyntheticData out;

  // One mean per (foul, off) pair, fixed norm = class_separation.
  out.class_means.resize(kFoulClasses * kSeverityClasses);
  for (std::size_t f = 0; f < kFoulClasses; ++f) {
    for (std::size_t o = 0; o < kSeverityClasses; ++o) {
      Vector mean(spec.dim);
      double norm2 = 0.0;
      for (std::size_t k = 0; k < spec.dim; ++k) {
        mean[k] = rng.normal();
        norm2 += mean[k] * mean[k];
      }
      const double s = spec.class_separation / std::sqrt(norm2);
      for (std::size_t k = 0; k < spec.dim; ++k) mean[k] *= s;
      out.class_means[f * kSeverityClasses + o] = std::move(mean);
    }
  }

  // Uninformative views match the informative per-entry second moment:
  // E[(mu_k + eps)^2] averaged over k = sep^2/d + sigma^2.
  const double noise_scale =
      std::sqrt(spec.class_separation * spec.class_separation / static_cast<double>(spec.dim) +
                spec.noise_sigma * spec.noise_sigma);

  out.samples.reserve(spec.n_samples);
  out.informative.reserve(spec.n_samples);
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    MultiViewSample s;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%06zu", i);
    s.action_id = id;
    s.foul_label = static_cast<int>(rng.pick_weighted(spec.foul_frequencies));
    s.off_label = static_cast<int>(rng.pick_weighted(spec.severity_frequencies));
    const Vector& mean =
        out.class_means[static_cast<std::size_t>(s.foul_label) * kSeverityClasses +
                        static_cast<std::size_t>(s.off_label)];

    // Choose which view slots carry signal.
    std::vector<std::size_t> slots(spec.views_per_sample);
    for (std::size_t v = 0; v < slots.size(); ++v) slots[v] = v;
    rng.shuffle(slots);
    std::vector<bool> mask(spec.views_per_sample, false);
    for (std::size_t v = 0; v < spec.n_informative_views; ++v) mask[slots[v]] = true;

    s.views = Matrix(spec.views_per_sample, spec.dim);
    for (std::size_t v = 0; v < spec.views_per_sample; ++v) {
      for (std::size_t k = 0; k < spec.dim; ++k) {
        s.views.at(v, k) = mask[v] ? mean[k] + spec.noise_sigma * rng.normal()
                                   : noise_scale * rng.normal();
      }
    }
    out.samples.push_back(std::move(s));
    out.informative.push_back(std::move(mask));
  }
  return out;
}

void save_informative_mask(const std::filesystem::path& path, const SyntheticData& data) {
  nlohmann::ordered_json mask = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (bool b : data.informative[i]) row.push_back(b);
    mask[data.samples[i].action_id] = std::move(row);
  }
  nlohmann::ordered_json j;
  j["format"] = "vars-informative-mask";
  j["mask"] = std::move(mask);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<std::vector<bool>> load_informative_mask(const std::filesystem::path& path,
                                                     const Dataset& dataset) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mask file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!j.contains("mask"))
    throw ParseError(path.string() + ": missing 'mask' object");
  std::vector<std::vector<bool>> out;
  out.reserve(dataset.size());
  for (const MultiViewSample& s : dataset) {
    if (!j["mask"].contains(s.action_id))
      throw ParseError(path.string() + ": no mask entry for action " + s.action_id);
    try {
      out.push_back(j["mask"][s.action_id].get<std::vector<bool>>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": malformed mask for action " + s.action_id +
                       ": " + e.what());
    }
  }
  return out;
}

Split split_dataset(const Dataset& dataset, std::size_t n_train, std::size_t n_val,
                    std::size_t n_test) {
  if (n_train + n_val + n_test > dataset.size())
    throw ContractError("split_dataset: requested " +
                        std::to_string(n_train + n_val + n_test) + " samples from " +
                        std::to_string(dataset.size()));
  Split s;
  s.train.assign(dataset.begin(), dataset.begin() + n_train);
  s.val.assign(dataset.begin() + n_train, dataset.begin() + n_train + n_val);
  s.test.assign(dataset.begin() + n_train + n_val,
                dataset.begin() + n_train + n_val + n_test);
  return s;
}

}  // namespace vars
