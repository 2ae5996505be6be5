#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "vars/data.hpp"
#include "vars/errors.hpp"

using namespace vars;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("label taxonomy is fixed") {
  CHECK(foul_type_names()[0] == "Standing tackling");
  CHECK(foul_type_names()[7] == "Dive/Simulation");
  CHECK(severity_names()[0] == "No offence");
  CHECK(severity_names()[3] == "Offence + Red card");
}

TEST_CASE("dataset round trip preserves every field") {
  SyntheticSpec spec;
  spec.n_samples = 25;
  spec.views_per_sample = 3;
  spec.dim = 5;
  spec.seed = 77;
  const SyntheticData data = generate_synthetic(spec);

  const auto path = temp_file("vars_roundtrip.jsonl");
  save_dataset(path, data.samples);
  const Dataset loaded = load_dataset(path);
  REQUIRE(loaded.size() == data.samples.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].action_id == data.samples[i].action_id);
    CHECK(loaded[i].foul_label == data.samples[i].foul_label);
    CHECK(loaded[i].off_label == data.samples[i].off_label);
    CHECK(loaded[i].views.rows == data.samples[i].views.rows);
    CHECK(loaded[i].views.data == data.samples[i].views.data);  // bit-exact
  }
  std::filesystem::remove(path);
}

TEST_CASE("empty dataset file loads as an empty dataset") {
  const auto path = temp_file("vars_empty.jsonl");
  std::ofstream(path).close();
  CHECK(load_dataset(path).empty());
  std::filesystem::remove(path);
}

TEST_CASE("label range and schema violations carry a line locus") {
  const auto path = temp_file("vars_badlabel.jsonl");
  {
    std::ofstream out(path);
    out << R"({"action_id":"a1","foul":0,"off":0,"views":[[1.0,2.0]]})" << "\n";
    out << R"({"action_id":"a2","foul":8,"off":0,"views":[[1.0,2.0]]})" << "\n";
  }
  try {
    load_dataset(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":2:") != std::string::npos);
    CHECK(msg.find("foul label") != std::string::npos);
  }
  std::filesystem::remove(path);

  const auto bad_json = temp_file("vars_badjson.jsonl");
  {
    std::ofstream out(bad_json);
    out << R"({"action_id":"a1","foul":0,"off":0,"views":[[1.0]]})" << "\n";
    out << "{not json\n";
  }
  CHECK_THROWS_AS(load_dataset(bad_json), ParseError);
  std::filesystem::remove(bad_json);

  const auto mixed_dim = temp_file("vars_mixdim.jsonl");
  {
    std::ofstream out(mixed_dim);
    out << R"({"action_id":"a1","foul":0,"off":0,"views":[[1.0,2.0]]})" << "\n";
    out << R"({"action_id":"a2","foul":0,"off":0,"views":[[1.0,2.0,3.0]]})" << "\n";
  }
  CHECK_THROWS_AS(load_dataset(mixed_dim), ParseError);
  std::filesystem::remove(mixed_dim);

  const auto bad_types = temp_file("vars_badtypes.jsonl");
  {
    std::ofstream out(bad_types);
    out << R"({"action_id":"a1","foul":"zero","off":0,"views":[[1.0]]})" << "\n";
  }
  CHECK_THROWS_AS(load_dataset(bad_types), ParseError);
  std::filesystem::remove(bad_types);

  const auto bad_value = temp_file("vars_badvalue.jsonl");
  {
    std::ofstream out(bad_value);
    out << R"({"action_id":"a1","foul":0,"off":0,"views":[["x"]]})" << "\n";
  }
  CHECK_THROWS_AS(load_dataset(bad_value), ParseError);
  std::filesystem::remove(bad_value);
}

TEST_CASE("subsample basics") {
  SyntheticSpec spec;
  spec.n_samples = 100;
  spec.dim = 4;
  spec.views_per_sample = 2;
  spec.n_informative_views = 1;
  spec.seed = 5;
  const Dataset full = generate_synthetic(spec).samples;

  CHECK(subsample(full, 1.0, 1).size() == 100);
  CHECK(subsample(full, 0.0, 1).empty());

  const Dataset half_a = subsample(full, 0.5, 1);
  const Dataset half_b = subsample(full, 0.5, 2);
  CHECK(half_a.size() == 50);
  CHECK(half_b.size() == 50);
  auto ids = [](const Dataset& d) {
    std::vector<std::string> v;
    for (const auto& s : d) v.push_back(s.action_id);
    return v;
  };
  CHECK(ids(half_a) != ids(half_b));                   // different seeds differ
  CHECK(ids(subsample(full, 0.5, 1)) == ids(half_a));  // same seed repeats
}

TEST_CASE("subsample is stratified per foul class") {
  SyntheticSpec spec;
  spec.n_samples = 400;
  spec.dim = 4;
  spec.views_per_sample = 2;
  spec.n_informative_views = 1;
  spec.seed = 6;
  const Dataset full = generate_synthetic(spec).samples;

  std::map<int, double> full_counts;
  for (const auto& s : full) full_counts[s.foul_label] += 1.0;

  for (double fraction : {0.25, 0.5, 0.75}) {
    const Dataset sub = subsample(full, fraction, 9);
    CHECK(sub.size() == static_cast<std::size_t>(std::llround(fraction * full.size())));
    std::map<int, double> sub_counts;
    for (const auto& s : sub) sub_counts[s.foul_label] += 1.0;
    for (const auto& [label, count] : full_counts)
      CHECK(std::abs(sub_counts[label] - fraction * count) <= 1.0 + 1e-9);
  }
}

TEST_CASE("synthetic generation is deterministic, byte for byte") {
  SyntheticSpec spec;
  spec.n_samples = 40;
  spec.seed = 123;
  const std::string a = dataset_to_jsonl(generate_synthetic(spec).samples);
  const std::string b = dataset_to_jsonl(generate_synthetic(spec).samples);
  CHECK(a == b);
  CHECK(fnv1a64(a) == fnv1a64(b));

  spec.seed = 124;
  CHECK(dataset_to_jsonl(generate_synthetic(spec).samples) != a);
}

TEST_CASE("noise-free informative views equal the class mean") {
  SyntheticSpec spec;
  spec.n_samples = 30;
  spec.views_per_sample = 3;
  spec.n_informative_views = 1;
  spec.noise_sigma = 0.0;
  spec.dim = 6;
  spec.seed = 31;
  const SyntheticData data = generate_synthetic(spec);
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const auto& s = data.samples[i];
    const Vector& mean =
        data.class_means[static_cast<std::size_t>(s.foul_label) * kSeverityClasses +
                         static_cast<std::size_t>(s.off_label)];
    std::size_t informative_count = 0;
    for (std::size_t v = 0; v < spec.views_per_sample; ++v) {
      if (!data.informative[i][v]) continue;
      ++informative_count;
      for (std::size_t k = 0; k < spec.dim; ++k) CHECK(s.views.at(v, k) == mean[k]);
    }
    CHECK(informative_count == spec.n_informative_views);
  }
}

TEST_CASE("all views informative when the spec says so") {
  SyntheticSpec spec;
  spec.n_samples = 10;
  spec.views_per_sample = 3;
  spec.n_informative_views = 3;
  spec.seed = 32;
  const SyntheticData data = generate_synthetic(spec);
  for (const auto& mask : data.informative)
    for (bool b : mask) CHECK(b);
}

TEST_CASE("nearest-class-mean oracle separates the default synthetic data") {
  SyntheticSpec spec;  // the defaults: 600 samples, 4 views, 2 informative, d=16
  spec.seed = 99;
  const SyntheticData data = generate_synthetic(spec);

  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const auto& s = data.samples[i];
    // average of the informative views only
    Vector probe(spec.dim, 0.0);
    double count = 0.0;
    for (std::size_t v = 0; v < spec.views_per_sample; ++v) {
      if (!data.informative[i][v]) continue;
      count += 1.0;
      for (std::size_t k = 0; k < spec.dim; ++k) probe[k] += s.views.at(v, k);
    }
    for (std::size_t k = 0; k < spec.dim; ++k) probe[k] /= count;

    std::size_t best = 0;
    double best_dist = 1e300;
    for (std::size_t c = 0; c < data.class_means.size(); ++c) {
      double dist = 0.0;
      for (std::size_t k = 0; k < spec.dim; ++k) {
        const double diff = probe[k] - data.class_means[c][k];
        dist += diff * diff;
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = c;
      }
    }
    const int foul = static_cast<int>(best / kSeverityClasses);
    const int off = static_cast<int>(best % kSeverityClasses);
    if (foul == s.foul_label && off == s.off_label) ++hits;
  }
  CHECK(static_cast<double>(hits) / static_cast<double>(spec.n_samples) >= 0.95);
}

TEST_CASE("informative mask round trip") {
  SyntheticSpec spec;
  spec.n_samples = 15;
  spec.seed = 44;
  const SyntheticData data = generate_synthetic(spec);
  const auto path = temp_file("vars_mask.json");
  save_informative_mask(path, data);
  CHECK(load_informative_mask(path, data.samples) == data.informative);
  std::filesystem::remove(path);
}

TEST_CASE("split_dataset slices in order") {
  SyntheticSpec spec;
  spec.n_samples = 20;
  spec.seed = 45;
  const Dataset full = generate_synthetic(spec).samples;
  const Split s = split_dataset(full, 12, 3, 5);
  CHECK(s.train.size() == 12);
  CHECK(s.val.size() == 3);
  CHECK(s.test.size() == 5);
  CHECK(s.train[0].action_id == full[0].action_id);
  CHECK(s.test[4].action_id == full[19].action_id);
  CHECK_THROWS_AS(split_dataset(full, 12, 4, 5), ContractError);
}

TEST_CASE("generated datasets pass schema validation") {
  SyntheticSpec spec;
  spec.n_samples = 12;
  spec.seed = 46;
  const auto path = temp_file("vars_schema.jsonl");
  save_dataset(path, generate_synthetic(spec).samples);
  CHECK(load_dataset(path).size() == 12);
  std::filesystem::remove(path);
}
