#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vars {

// Complete table of categorical decisions: one row per action, one column per
// rater, plus the ground-truth column. Codes index into `labels`.
struct RaterTable {
  std::vector<std::string> labels;
  std::vector<std::string> action_ids;
  std::vector<int> ground_truth;          // n_actions
  std::vector<std::string> rater_names;   // n_raters
  std::vector<std::string> rater_groups;  // empty, or one group label per rater
  std::vector<int> decisions;             // n_actions * n_raters, row-major

  std::size_t n_actions() const { return ground_truth.size(); }
  std::size_t n_raters() const { return rater_names.size(); }
  int decision(std::size_t action, std::size_t rater) const {
    return decisions[action * n_raters() + rater];
  }
  bool has_groups() const { return !rater_groups.empty(); }
  // Rater indices in `group`; every rater when group is empty.
  std::vector<std::size_t> raters_in_group(std::string_view group) const;
  std::vector<std::string> group_names() const;  // in first-appearance order
};

// (p_o - p_e) / (1 - p_e). Returns exactly 1.0 when both raters are constant
// and equal (p_e == 1); NaN if p_e == 1 with disagreement, which cannot arise
// from a real table and marks the pair as undefined.
double cohen_kappa(std::span<const int> a, std::span<const int> b, std::size_t n_labels);

struct KappaSummary {
  double average = 0.0;        // mean over defined unordered pairs
  std::size_t pairs_used = 0;
  std::size_t pairs_undefined = 0;
};

// Unweighted mean of pairwise Cohen's kappa over all rater pairs in the group
// (Light's kappa). Undefined pairs are excluded and counted.
KappaSummary average_kappa(const RaterTable& table, std::string_view group = "");

// Percentages of actions with exactly 1, 2, ..., K distinct decisions among
// the group's raters, K = min(raters in group, labels). Sums to 100.
std::vector<double> consensus_histogram(const RaterTable& table, std::string_view group = "");

// Per-rater fraction of actions matching the ground-truth column.
std::vector<double> rater_accuracy(const RaterTable& table);

// Built-in label sets: "foul_type" (8 codes) or "offence_severity" (4 codes).
std::vector<std::string> task_labels(std::string_view task);

// CSV with header `action_id,ground_truth,rater_1,...`, optionally followed by
// a `groups,,<g1>,<g2>,...` line assigning a group to each rater. Cells hold
// either a label string or a numeric code.
RaterTable load_rater_table(const std::filesystem::path& path,
                            const std::vector<std::string>& labels);

}  // namespace vars
