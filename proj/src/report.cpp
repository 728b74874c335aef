#include "tsdiag/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tsdiag/error.hpp"

#ifndef TSDIAG_VERSION
#define TSDIAG_VERSION "0.0.0"
#endif

namespace tsdiag {

std::string_view tool_version() { return TSDIAG_VERSION; }

SplitSummary summarize_split(const std::string& name,
                             std::span<const ChangeProfile> profiles) {
  SplitSummary s;
  s.name = name;
  s.count = profiles.size();
  if (profiles.empty()) return s;
  std::vector<double> pct = change_percentages(profiles);
  double len_diff = 0.0;
  std::size_t noisy = 0;
  for (const auto& p : profiles) {
    len_diff += static_cast<double>(p.len_diff);
    if (p.normalized_pct >= kNoiseBandPct) ++noisy;
    for (std::size_t k = 0; k < kEditKindCount; ++k) s.op_totals[k] += p.counts[k];
  }
  s.mean_pct = stable_mean(pct);
  std::sort(pct.begin(), pct.end());
  const std::size_t mid = pct.size() / 2;
  s.median_pct = pct.size() % 2 ? pct[mid] : 0.5 * (pct[mid - 1] + pct[mid]);
  s.noise_share = static_cast<double>(noisy) / static_cast<double>(s.count);
  s.mean_len_diff = len_diff / static_cast<double>(s.count);
  return s;
}

AnalysisReport analyze_divergence(const Dataset& dataset,
                                  const DivergenceOptions& options) {
  AnalysisReport report;
  report.dataset = dataset.name;
  report.options = options;

  std::map<std::string, std::vector<double>> values;
  for (const auto& name : dataset.ordered_split_names()) {
    const Split& split = dataset.split(name);
    if (split.empty()) continue;
    auto profiles = profile_split(split);
    report.splits.push_back(summarize_split(name, profiles));
    values[name] = change_percentages(profiles);
  }
  const Split& reference = dataset.split(options.reference_split);
  if (reference.empty())
    throw Error(ErrorCode::EmptySplit,
                "split '" + options.reference_split + "' has no pairs");

  PermTestOptions perm;
  perm.iterations = options.iterations;
  perm.seed = options.seed;
  perm.bins = options.bins;
  perm.smoothing = options.smoothing;

  const auto& ref_values = values.at(options.reference_split);
  const auto ref_hist = histogram(ref_values, options.bins);
  for (const auto& other : options.other_splits) {
    if (!dataset.has_split(other) || other == options.reference_split) continue;
    if (dataset.split(other).empty())
      throw Error(ErrorCode::EmptySplit, "split '" + other + "' has no pairs");
    const auto& other_values = values.at(other);
    DivergenceRow row;
    row.pair = options.reference_split + "/" + other;
    row.kl = kl_divergence(ref_hist, histogram(other_values, options.bins),
                           options.smoothing);
    row.kl.p_name = options.reference_split;
    row.kl.q_name = other;
    row.perm = permutation_test(ref_values, other_values, perm);
    row.reject = decide_null(row.perm, options.alpha);
    report.rows.push_back(std::move(row));
  }
  return report;
}

nlohmann::json to_json(const SplitSummary& s) {
  nlohmann::json ops;
  for (std::size_t k = 0; k < kEditKindCount; ++k) {
    std::string key(to_string(static_cast<EditKind>(k)));
    std::transform(key.begin(), key.end(), key.begin(), ::tolower);
    ops[key] = s.op_totals[k];
  }
  return {{"name", s.name},
          {"count", s.count},
          {"mean_pct", s.mean_pct},
          {"median_pct", s.median_pct},
          {"noise_share", s.noise_share},
          {"noise_band_pct", kNoiseBandPct},
          {"mean_len_diff", s.mean_len_diff},
          {"op_totals", ops}};
}

nlohmann::json to_json(const PermTestResult& r) {
  return {{"kl", r.observed_kl},
          {"kl_units", "nats"},
          {"bins", r.bins},
          {"smoothing", r.smoothing},
          {"iterations", r.iterations},
          {"count_geq", r.count_geq},
          {"p_value", r.p_value},
          {"seed", r.seed},
          {"max_permuted_kl", r.max_permuted_kl},
          {"reject_at_0_05", decide_null(r, 0.05)}};
}

nlohmann::json to_json(const AnalysisReport& report) {
  nlohmann::json splits = nlohmann::json::array();
  for (const auto& s : report.splits) splits.push_back(to_json(s));
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"dataset", report.dataset},
                    {"pair", row.pair},
                    {"kl", row.kl.value},
                    {"bins", row.kl.bins},
                    {"smoothing", row.kl.smoothing},
                    {"iterations", row.perm.iterations},
                    {"count_geq", row.perm.count_geq},
                    {"p_value", row.perm.p_value},
                    {"seed", row.perm.seed},
                    {"reject_at_0_05", decide_null(row.perm, 0.05)},
                    {"reject", row.reject}});
  }
  const auto& o = report.options;
  return {{"tool", "tsdiag"},
          {"version", std::string(tool_version())},
          {"dataset", report.dataset},
          {"kl_units", "nats"},
          {"parameters",
           {{"reference_split", o.reference_split},
            {"bins", o.bins},
            {"smoothing", o.smoothing},
            {"iterations", o.iterations},
            {"seed", o.seed},
            {"alpha", o.alpha}}},
          {"splits", splits},
          {"rows", rows}};
}

nlohmann::json to_json(const SariScore& score) {
  nlohmann::json per_n = nlohmann::json::array();
  for (std::size_t n = 0; n < kSariMaxOrder; ++n) {
    auto value = [](const std::optional<double>& v) -> nlohmann::json {
      return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    per_n.push_back({{"n", n + 1},
                     {"f_add", value(score.per_n[n].add)},
                     {"f_keep", value(score.per_n[n].keep)},
                     {"p_del", value(score.per_n[n].del)}});
  }
  return {{"sari", score.sari},
          {"f_add", score.f_add},
          {"f_keep", score.f_keep},
          {"p_del", score.p_del},
          {"per_n", per_n}};
}

nlohmann::json to_json(const PairedPermResult& r) {
  return {{"mean_a", r.mean_a},       {"mean_b", r.mean_b},
          {"observed", r.observed},   {"iterations", r.iterations},
          {"count_geq", r.count_geq}, {"p_value", r.p_value},
          {"seed", r.seed},           {"reject_at_0_05", r.p_value < 0.05}};
}

std::string format_p_value(double p_value, std::size_t iterations) {
  if (p_value == 0.0 && iterations > 0)
    return "<" + format_double(1.0 / static_cast<double>(iterations));
  return format_double(p_value, 5);
}

std::string render_markdown(const AnalysisReport& report) {
  std::ostringstream out;
  out << "| Dataset | Split | KL-div | p-value | Reject (alpha "
      << format_double(report.options.alpha) << ") |\n"
      << "|---|---|---|---|---|\n";
  for (const auto& row : report.rows) {
    std::string label = row.pair;
    if (!label.empty()) label[0] = static_cast<char>(::toupper(label[0]));
    if (auto slash = label.find('/'); slash + 1 < label.size())
      label[slash + 1] = static_cast<char>(::toupper(label[slash + 1]));
    out << "| " << report.dataset << " | " << label << " | "
        << format_double(row.kl.value, 4) << " | "
        << format_p_value(row.perm.p_value, row.perm.iterations) << " | "
        << (row.reject ? "yes" : "no") << " |\n";
  }
  out << "\nKL in nats; " << report.options.bins << " bins over [0, 100], smoothing "
      << format_double(report.options.smoothing) << ", "
      << report.options.iterations << " permutations, seed " << report.options.seed
      << ".\n";
  return out.str();
}

}  // namespace tsdiag
