#include "vars/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "vars/data.hpp"
#include "vars/errors.hpp"

namespace vars {

std::vector<std::size_t> RaterTable::raters_in_group(std::string_view group) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < n_raters(); ++r) {
    if (group.empty() || (has_groups() && rater_groups[r] == group)) out.push_back(r);
  }
  return out;
}

std::vector<std::string> RaterTable::group_names() const {
  std::vector<std::string> out;
  for (const std::string& g : rater_groups)
    if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
  return out;
}

double cohen_kappa(std::span<const int> a, std::span<const int> b, std::size_t n_labels) {
  if (a.size() != b.size())
    throw ContractError("cohen_kappa: decision vectors differ in length (" +
                        std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  if (a.empty()) throw ContractError("cohen_kappa: empty decision vectors");

  const double n = static_cast<double>(a.size());
  std::vector<std::int64_t> count_a(n_labels, 0), count_b(n_labels, 0);
  std::int64_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++count_a[static_cast<std::size_t>(a[i])];
    ++count_b[static_cast<std::size_t>(b[i])];
    if (a[i] == b[i]) ++agree;
  }
  const double p_o = static_cast<double>(agree) / n;

  // p_e == 1 exactly when both raters are constant on the same label.
  bool a_constant = false, b_constant = false;
  std::size_t a_label = 0, b_label = 0;
  for (std::size_t k = 0; k < n_labels; ++k) {
    if (count_a[k] == static_cast<std::int64_t>(a.size())) { a_constant = true; a_label = k; }
    if (count_b[k] == static_cast<std::int64_t>(b.size())) { b_constant = true; b_label = k; }
  }
  if (a_constant && b_constant && a_label == b_label) {
    if (agree == static_cast<std::int64_t>(a.size())) return 1.0;
    return std::numeric_limits<double>::quiet_NaN();  // unreachable for real input
  }

  double p_e = 0.0;
  for (std::size_t k = 0; k < n_labels; ++k)
    p_e += (static_cast<double>(count_a[k]) / n) * (static_cast<double>(count_b[k]) / n);
  return (p_o - p_e) / (1.0 - p_e);
}

KappaSummary average_kappa(const RaterTable& table, std::string_view group) {
  const std::vector<std::size_t> raters = table.raters_in_group(group);
  if (raters.size() < 2)
    throw ContractError("average_kappa: group '" + std::string(group) +
                        "' has fewer than 2 raters");
  const std::size_t n = table.n_actions();
  std::vector<int> col_i(n), col_j(n);
  KappaSummary out;
  double sum = 0.0;
  for (std::size_t i = 0; i < raters.size(); ++i) {
    for (std::size_t j = i + 1; j < raters.size(); ++j) {
      for (std::size_t act = 0; act < n; ++act) {
        col_i[act] = table.decision(act, raters[i]);
        col_j[act] = table.decision(act, raters[j]);
      }
      const double k = cohen_kappa(col_i, col_j, table.labels.size());
      if (std::isnan(k)) {
        ++out.pairs_undefined;
      } else {
        sum += k;
        ++out.pairs_used;
      }
    }
  }
  if (out.pairs_used == 0)
    throw ContractError("average_kappa: every rater pair is undefined");
  out.average = sum / static_cast<double>(out.pairs_used);
  return out;
}

std::vector<double> consensus_histogram(const RaterTable& table, std::string_view group) {
  const std::vector<std::size_t> raters = table.raters_in_group(group);
  if (raters.empty())
    throw ContractError("consensus_histogram: group '" + std::string(group) + "' is empty");
  const std::size_t k_max = std::min(raters.size(), table.labels.size());
  std::vector<std::int64_t> counts(k_max, 0);
  std::set<int> seen;
  for (std::size_t act = 0; act < table.n_actions(); ++act) {
    seen.clear();
    for (std::size_t r : raters) seen.insert(table.decision(act, r));
    counts[seen.size() - 1] += 1;
  }
  std::vector<double> out(k_max, 0.0);
  const double n = static_cast<double>(table.n_actions());
  for (std::size_t i = 0; i < k_max; ++i)
    out[i] = 100.0 * static_cast<double>(counts[i]) / n;
  return out;
}

std::vector<double> rater_accuracy(const RaterTable& table) {
  std::vector<double> out(table.n_raters(), 0.0);
  const std::size_t n = table.n_actions();
  if (n == 0) return out;
  for (std::size_t r = 0; r < table.n_raters(); ++r) {
    std::int64_t hits = 0;
    for (std::size_t act = 0; act < n; ++act)
      if (table.decision(act, r) == table.ground_truth[act]) ++hits;
    out[r] = static_cast<double>(hits) / static_cast<double>(n);
  }
  return out;
}

std::vector<std::string> task_labels(std::string_view task) {
  if (task == "foul_type") {
    const auto& names = foul_type_names();
    return {names.begin(), names.end()};
  }
  if (task == "offence_severity") {
    const auto& names = severity_names();
    return {names.begin(), names.end()};
  }
  throw ConfigError("unknown task '" + std::string(task) +
                    "' (expected foul_type or offence_severity)");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

int parse_code(const std::string& cell, const std::vector<std::string>& labels,
               const std::string& file, std::size_t line_no) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == cell) return static_cast<int>(i);
  // fall back to a numeric code
  try {
    std::size_t used = 0;
    const int code = std::stoi(cell, &used);
    if (used == cell.size() && code >= 0 && static_cast<std::size_t>(code) < labels.size())
      return code;
  } catch (const std::exception&) {
  }
  throw ParseError(file, line_no, "decision '" + cell + "' is not in the label set");
}

}  // namespace

RaterTable load_rater_table(const std::filesystem::path& path,
                            const std::vector<std::string>& labels) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open rater table file: " + path.string());
  if (labels.size() < 2) throw ConfigError("load_rater_table: need at least 2 labels");

  RaterTable table;
  table.labels = labels;
  const std::string fname = path.string();

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(fname, 1, "missing header row");
  ++line_no;
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "action_id" || header[1] != "ground_truth")
    throw ParseError(fname, line_no,
                     "header must start with action_id,ground_truth,<rater>,...");
  table.rater_names.assign(header.begin() + 2, header.end());

  bool first_data_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (first_data_line && !cells.empty() && cells[0] == "groups") {
      if (cells.size() != header.size())
        throw ParseError(fname, line_no, "groups row must have one entry per column");
      table.rater_groups.assign(cells.begin() + 2, cells.end());
      first_data_line = false;
      continue;
    }
    first_data_line = false;
    if (cells.size() != header.size())
      throw ParseError(fname, line_no,
                       "expected " + std::to_string(header.size()) + " cells, found " +
                           std::to_string(cells.size()));
    table.action_ids.push_back(cells[0]);
    table.ground_truth.push_back(parse_code(cells[1], labels, fname, line_no));
    for (std::size_t r = 2; r < cells.size(); ++r)
      table.decisions.push_back(parse_code(cells[r], labels, fname, line_no));
  }
  if (table.n_actions() == 0) throw ParseError(fname, line_no, "no action rows");
  return table;
}

}  // namespace vars
