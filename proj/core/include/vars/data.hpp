#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vars/matrix.hpp"

namespace vars {

inline constexpr std::size_t kFoulClasses = 8;
inline constexpr std::size_t kSeverityClasses = 4;

const std::array<std::string, kFoulClasses>& foul_type_names();
const std::array<std::string, kSeverityClasses>& severity_names();

// One action: n>=1 views of feature vectors plus both task labels.
struct MultiViewSample {
  std::string action_id;
  Matrix views;  // n_views x dim
  int foul_label = 0;
  int off_label = 0;
};

using Dataset = std::vector<MultiViewSample>;

// JSON-lines dataset file, one record per action:
//   {"action_id": "...", "foul": 0-7, "off": 0-3, "views": [[...], ...]}
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);
std::string dataset_to_jsonl(const Dataset& dataset);

// FNV-1a 64-bit, used for dataset hashes in run manifests.
std::uint64_t fnv1a64(std::string_view bytes);

// round(fraction * N) samples without replacement, stratified by foul label so
// every class shrinks proportionally (class counts stay within +-1 of
// fraction * class count). Keeps the original sample order.
Dataset subsample(const Dataset& dataset, double fraction, std::uint64_t seed);

struct SyntheticSpec {
  std::size_t n_samples = 600;
  std::size_t views_per_sample = 4;
  std::size_t n_informative_views = 2;
  std::size_t dim = 16;
  double class_separation = 3.0;
  double noise_sigma = 0.5;
  std::uint64_t seed = 0;
  // Default frequencies mimic a skewed foul-type distribution and a rare
  // red-card severity.
  std::vector<double> foul_frequencies = {0.35, 0.25, 0.05, 0.10, 0.10, 0.05, 0.07, 0.03};
  std::vector<double> severity_frequencies = {0.40, 0.30, 0.25, 0.05};
};

struct SyntheticData {
  Dataset samples;
  // informative[i][v] marks whether view v of sample i carries class signal.
  std::vector<std::vector<bool>> informative;
  // class_means[foul * kSeverityClasses + off], each of length dim.
  std::vector<Vector> class_means;
};

// Planted-structure generator: each (foul, off) pair owns a fixed mean vector
// of norm `class_separation`; informative views are mean + N(0, sigma^2),
// uninformative views are zero-mean noise with the same per-entry second
// moment. Deterministic in the seed.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

void save_informative_mask(const std::filesystem::path& path, const SyntheticData& data);
std::vector<std::vector<bool>> load_informative_mask(const std::filesystem::path& path,
                                                     const Dataset& dataset);

struct Split {
  Dataset train;
  Dataset val;
  Dataset test;
};

// Order-preserving prefix/middle/suffix split; sizes must not exceed the set.
Split split_dataset(const Dataset& dataset, std::size_t n_train, std::size_t n_val,
                    std::size_t n_test);

}  // namespace vars
