#pragma once

// Report assembly shared by the command-line tool: split summaries, the
// test-vs-other divergence table, and JSON / Markdown renderings.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "tsdiag/corpus_io.hpp"
#include "tsdiag/dist_stats.hpp"
#include "tsdiag/edit_ops.hpp"
#include "tsdiag/refine_split.hpp"
#include "tsdiag/sari.hpp"

namespace tsdiag {

std::string_view tool_version();

inline constexpr double kNoiseBandPct = 80.0;

struct SplitSummary {
  std::string name;
  std::size_t count = 0;
  double mean_pct = 0.0;
  double median_pct = 0.0;
  double noise_share = 0.0;  // fraction of pairs with normalized_pct >= 80
  double mean_len_diff = 0.0;
  std::array<std::size_t, kEditKindCount> op_totals{};
};

SplitSummary summarize_split(const std::string& name,
                             std::span<const ChangeProfile> profiles);

struct DivergenceOptions {
  std::string reference_split = "test";
  std::vector<std::string> other_splits = {"dev", "train"};
  std::size_t bins = kDefaultBins;
  double smoothing = kDefaultSmoothing;
  std::size_t iterations = 100000;
  std::uint64_t seed = kDefaultSeed;
  double alpha = kDefaultAlpha;
};

struct DivergenceRow {
  std::string pair;  // e.g. "test/dev"
  KLResult kl;
  PermTestResult perm;
  bool reject = false;
};

struct AnalysisReport {
  std::string dataset;
  std::vector<SplitSummary> splits;
  std::vector<DivergenceRow> rows;
  DivergenceOptions options;
};

// Rows for every listed other split that exists in the dataset; the
// reference split must exist (UnknownSplit otherwise).
AnalysisReport analyze_divergence(const Dataset& dataset,
                                  const DivergenceOptions& options);

nlohmann::json to_json(const SplitSummary& summary);
nlohmann::json to_json(const PermTestResult& result);
nlohmann::json to_json(const AnalysisReport& report);
nlohmann::json to_json(const SariScore& score);
nlohmann::json to_json(const PairedPermResult& result);

// "< 1/iterations" style rendering when the p-value is 0.
std::string format_p_value(double p_value, std::size_t iterations);

// Markdown table: | Dataset | Split | KL-div | p-value | reject |
std::string render_markdown(const AnalysisReport& report);

}  // namespace tsdiag
