#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "tsdiag/error.hpp"
#include "tsdiag/report.hpp"

namespace tsdiag::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalFlags {
  std::uint64_t seed = kDefaultSeed;
  std::size_t bins = kDefaultBins;
  double smoothing = kDefaultSmoothing;
  std::size_t iterations = 100000;
  std::string manifest;
  std::string out;
  std::string format = "json";
};

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << text;
    return;
  }
  const fs::path path(out_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  file << text;
  if (!file) throw Error(ErrorCode::IoError, "cannot write '" + out_path + "'");
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  file << text;
  if (!file) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void require(const std::string& value, const char* flag) {
  if (value.empty())
    throw Error(ErrorCode::InvalidArgument, std::string(flag) + " is required");
}

std::vector<double> read_values(const std::string& path) {
  std::vector<double> values;
  for (const auto& line : read_lines(path)) {
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      values.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument,
                  "'" + path + "': not a number: '" + line + "'");
    }
  }
  return values;
}

std::vector<TokenSeq> read_sentences(const std::string& path) {
  std::vector<TokenSeq> seqs;
  for (const auto& line : read_lines(path)) seqs.push_back(normalize_line(line));
  return seqs;
}

// ---------------------------------------------------------------- profile

void cmd_profile(const GlobalFlags& g, std::ostream& out) {
  require(g.manifest, "--manifest");
  require(g.out, "--out");
  LoadReport load;
  Dataset ds = load_dataset(fs::path(g.manifest), &load);
  const fs::path dir(g.out);
  fs::create_directories(dir);
  json summaries = json::array();
  for (const auto& name : ds.ordered_split_names()) {
    auto profiles = profile_split(ds.split(name));
    std::ostringstream profile_csv, density_csv;
    write_profiles_csv(profile_csv, profiles);
    write_histogram_csv(density_csv, histogram(change_percentages(profiles), g.bins));
    write_file(dir / (name + ".profile.csv"), profile_csv.str());
    write_file(dir / (name + ".density.csv"), density_csv.str());
    summaries.push_back(to_json(summarize_split(name, profiles)));
  }
  json report = {{"tool", "tsdiag"},
                 {"version", std::string(tool_version())},
                 {"dataset", ds.name},
                 {"bins", g.bins},
                 {"splits", summaries},
                 {"empty_source_lines", load.empty_source_lines.size()},
                 {"empty_target_lines", load.empty_target_lines.size()},
                 {"warnings", load.warnings}};
  out << dump(report);
}

// ------------------------------------------------------------- divergence

std::string divergence_csv(const AnalysisReport& r) {
  std::ostringstream csv;
  csv << "dataset,pair,kl,bins,smoothing,iterations,count_geq,p_value,seed,reject_at_0_05\n";
  for (const auto& row : r.rows)
    csv << r.dataset << ',' << row.pair << ',' << format_double(row.kl.value) << ','
        << row.kl.bins << ',' << format_double(row.kl.smoothing) << ','
        << row.perm.iterations << ',' << row.perm.count_geq << ','
        << format_double(row.perm.p_value) << ',' << row.perm.seed << ','
        << (decide_null(row.perm, 0.05) ? "true" : "false") << '\n';
  return csv.str();
}

void cmd_divergence(const GlobalFlags& g, const std::string& reference, double alpha,
                    std::ostream& out) {
  require(g.manifest, "--manifest");
  Dataset ds = load_dataset(fs::path(g.manifest));
  DivergenceOptions opts;
  opts.reference_split = reference;
  opts.bins = g.bins;
  opts.smoothing = g.smoothing;
  opts.iterations = g.iterations;
  opts.seed = g.seed;
  opts.alpha = alpha;
  auto report = analyze_divergence(ds, opts);
  std::string text;
  if (g.format == "md") text = render_markdown(report);
  else if (g.format == "csv") text = divergence_csv(report);
  else text = dump(to_json(report));
  emit(text, g.out, out);
}

// --------------------------------------------------------------- permtest

void cmd_permtest(const GlobalFlags& g, const std::string& split_a,
                  const std::string& split_b, const std::string& values_a,
                  const std::string& values_b, std::ostream& out) {
  PermTestOptions opts{g.iterations, g.seed, g.bins, g.smoothing};
  std::vector<double> a, b;
  json head;
  if (!values_a.empty() || !values_b.empty()) {
    require(values_a, "--values-a");
    require(values_b, "--values-b");
    a = read_values(values_a);
    b = read_values(values_b);
    head = {{"values_a", values_a}, {"values_b", values_b}};
  } else {
    require(g.manifest, "--manifest");
    Dataset ds = load_dataset(fs::path(g.manifest));
    a = change_percentages(profile_split(ds.split(split_a)));
    b = change_percentages(profile_split(ds.split(split_b)));
    head = {{"dataset", ds.name}, {"pair", split_a + "/" + split_b}};
  }
  auto result = permutation_test(a, b, opts);
  json j = head;
  j.update(to_json(result));
  j["tool"] = "tsdiag";
  j["version"] = std::string(tool_version());
  emit(dump(j), g.out, out);
}

// -------------------------------------------------------- refine / resplit

std::string_view key_name(RankingKey key) {
  return key == RankingKey::RawDistance ? "raw" : "pct";
}

std::string_view order_name(DropOrder order) {
  return order == DropOrder::DropThenPool ? "drop-then-pool" : "pool-then-drop";
}

json sizes_json(const SplitSizes& sizes) {
  json j = json::object();
  for (const auto& [name, size] : sizes) j[name] = size;
  return j;
}

SplitSizes parse_sizes(const std::string& text) {
  SplitSizes sizes;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::InvalidArgument, "--sizes expects name=count,...");
    try {
      sizes.emplace_back(item.substr(0, eq), std::stoull(item.substr(eq + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad size in '" + item + "'");
    }
  }
  return sizes;
}

void write_resplit(const Dataset& original, const Dataset& result, const RefinePlan& plan,
                   const std::string& command, const GlobalFlags& g, std::ostream& out) {
  const fs::path dir(g.out);
  write_dataset(result, dir);
  SplitSizes original_sizes, new_sizes;
  for (const auto& name : original.ordered_split_names())
    original_sizes.emplace_back(name, original.split(name).size());
  for (const auto& name : result.ordered_split_names())
    new_sizes.emplace_back(name, result.split(name).size());
  const std::size_t kept = result.total_pairs();
  json manifest = {{"tool", "tsdiag"},
                   {"version", std::string(tool_version())},
                   {"command", command},
                   {"dataset", original.name},
                   {"source_manifest", g.manifest},
                   {"drop_fraction", plan.drop_fraction},
                   {"seed", plan.seed},
                   {"rank_by", key_name(plan.ranking_key)},
                   {"drop_order", order_name(plan.order)},
                   {"original_sizes", sizes_json(original_sizes)},
                   {"sizes", sizes_json(new_sizes)},
                   {"pairs_in", original.total_pairs()},
                   {"pairs_out", kept},
                   {"dropped", original.total_pairs() - kept}};
  write_file(dir / "manifest.json", dump(manifest));
  out << dump(manifest);
}

void cmd_refine(const GlobalFlags& g, double drop_percent, const std::string& rank_by,
                const std::string& order, const std::string& sizes, bool resplit_only,
                std::ostream& out) {
  require(g.manifest, "--manifest");
  require(g.out, "--out");
  if (!(drop_percent >= 0.0 && drop_percent < 100.0))
    throw Error(ErrorCode::InvalidArgument, "--drop-percent must lie in [0, 100)");
  Dataset ds = load_dataset(fs::path(g.manifest));
  RefinePlan plan;
  plan.drop_fraction = drop_percent / 100.0;
  plan.seed = g.seed;
  plan.ranking_key = rank_by == "raw" ? RankingKey::RawDistance : RankingKey::NormalizedPct;
  plan.order = order == "drop-then-pool" ? DropOrder::DropThenPool : DropOrder::PoolThenDrop;
  if (!sizes.empty()) plan.proportions = parse_sizes(sizes);
  Dataset result = refine_and_resplit(ds, plan);
  write_resplit(ds, result, plan, resplit_only ? "resplit" : "refine", g, out);
}

// ------------------------------------------------------------------- sari

struct SariInputs {
  std::vector<TokenSeq> sources;
  std::vector<std::vector<TokenSeq>> references;
};

SariInputs load_sari_inputs(const std::string& source,
                            const std::vector<std::string>& refs) {
  require(source, "--source");
  if (refs.empty()) throw Error(ErrorCode::NoReferences, "--refs needs at least one file");
  std::vector<fs::path> ref_paths(refs.begin(), refs.end());
  auto set = load_multi_reference(source, ref_paths);
  return {std::move(set.sources), std::move(set.references)};
}

std::vector<TokenSeq> load_outputs(const std::string& path, std::size_t expected) {
  require(path, "--output");
  auto outputs = read_sentences(path);
  if (outputs.size() != expected)
    throw Error(ErrorCode::LineCountMismatch,
                "'" + path + "' has " + std::to_string(outputs.size()) +
                    " lines, source has " + std::to_string(expected));
  return outputs;
}

void cmd_sari(const GlobalFlags& g, const std::string& source, const std::string& output,
              const std::vector<std::string>& refs, const std::string& per_sentence,
              std::ostream& out) {
  auto inputs = load_sari_inputs(source, refs);
  auto outputs = load_outputs(output, inputs.sources.size());
  auto score = sari_corpus(inputs.sources, outputs, inputs.references);
  std::ostringstream csv;
  write_sari_csv(csv, score.sentences);
  if (!per_sentence.empty()) emit(csv.str(), per_sentence, out);
  if (g.format == "csv") {
    emit(csv.str(), g.out, out);
    return;
  }
  json j = to_json(score.mean);
  j["n_sentences"] = score.sentences.size();
  j["n_references"] = refs.size();
  j["variant"] = kSariVariant;
  j["tool"] = "tsdiag";
  j["version"] = std::string(tool_version());
  emit(dump(j), g.out, out);
}

void cmd_sari_permtest(const GlobalFlags& g, const std::string& source,
                       const std::string& output_a, const std::string& output_b,
                       const std::vector<std::string>& refs, std::ostream& out) {
  auto inputs = load_sari_inputs(source, refs);
  auto a = sari_corpus(inputs.sources, load_outputs(output_a, inputs.sources.size()),
                       inputs.references);
  auto b = sari_corpus(inputs.sources, load_outputs(output_b, inputs.sources.size()),
                       inputs.references);
  std::vector<double> sa, sb;
  for (const auto& s : a.sentences) sa.push_back(s.sari);
  for (const auto& s : b.sentences) sb.push_back(s.sari);
  auto result = paired_permutation_test(sa, sb, g.iterations, g.seed);
  json j = to_json(result);
  j["sari_a"] = a.mean.sari;
  j["sari_b"] = b.mean.sari;
  j["n_sentences"] = sa.size();
  j["statistic"] = "abs_mean_sentence_sari_difference";
  j["variant"] = kSariVariant;
  j["tool"] = "tsdiag";
  j["version"] = std::string(tool_version());
  emit(dump(j), g.out, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"tsdiag: diagnostics for parallel text-simplification corpora", "tsdiag"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(tool_version()));

  GlobalFlags g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--bins", g.bins, "Histogram bins over [0, 100]")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--smoothing", g.smoothing, "Pseudo-count added to every bin")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--iterations", g.iterations, "Permutation iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--manifest", g.manifest, "Dataset manifest (key = value file)");
  app.add_option("--out", g.out, "Output file or directory ('-' for stdout)");
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"json", "csv", "md"}))
      ->capture_default_str();

  auto* profile = app.add_subcommand("profile", "Per-pair edit profiles and densities per split");

  auto* divergence =
      app.add_subcommand("divergence", "KL divergence and permutation p-values, test vs dev/train");
  std::string reference = "test";
  double alpha = kDefaultAlpha;
  divergence->add_option("--reference", reference, "Reference split")->capture_default_str();
  divergence->add_option("--alpha", alpha, "Significance level")->capture_default_str();

  auto* permtest = app.add_subcommand("permtest", "Permutation test between two samples");
  std::string split_a = "test", split_b = "dev", values_a, values_b;
  permtest->add_option("--a", split_a, "First split")->capture_default_str();
  permtest->add_option("--b", split_b, "Second split")->capture_default_str();
  permtest->add_option("--values-a", values_a, "File of values in [0, 100], one per line");
  permtest->add_option("--values-b", values_b, "File of values in [0, 100], one per line");

  auto* refine = app.add_subcommand("refine", "Drop the worst alignments and resplit at random");
  double drop_percent = 0.0;
  std::string rank_by = "pct", order = "pool-then-drop", sizes;
  refine->add_option("--drop-percent", drop_percent, "Percent of pairs to drop")->required();
  refine->add_option("--rank-by", rank_by, "Ranking key")
      ->check(CLI::IsMember({"pct", "raw"}))
      ->capture_default_str();
  refine->add_option("--drop-order", order, "Where the drop happens")
      ->check(CLI::IsMember({"pool-then-drop", "drop-then-pool"}))
      ->capture_default_str();
  refine->add_option("--sizes", sizes, "Target sizes, e.g. train=80,dev=10,test=10");

  auto* resplit = app.add_subcommand("resplit", "Pool all splits and resplit at random");
  resplit->add_option("--sizes", sizes, "Target sizes, e.g. train=80,dev=10,test=10");

  auto* sari = app.add_subcommand("sari", "Corpus SARI against one or more references");
  std::string source, output, output_b, per_sentence;
  std::vector<std::string> refs;
  sari->add_option("--source", source, "Source sentences")->required();
  sari->add_option("--output", output, "System output")->required();
  sari->add_option("--refs", refs, "Reference files")->required()->expected(1, -1);
  sari->add_option("--per-sentence", per_sentence, "Per-sentence CSV path");

  auto* sari_perm = app.add_subcommand(
      "sari-permtest", "Paired permutation test on sentence SARI of two systems");
  sari_perm->add_option("--source", source, "Source sentences")->required();
  sari_perm->add_option("--output-a", output, "First system output")->required();
  sari_perm->add_option("--output-b", output_b, "Second system output")->required();
  sari_perm->add_option("--refs", refs, "Reference files")->required()->expected(1, -1);

  std::vector<std::string> argv_tail(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv_tail.begin(), argv_tail.end());
  try {
    app.parse(argv_tail);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "tsdiag: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (*profile) cmd_profile(g, out);
    else if (*divergence) cmd_divergence(g, reference, alpha, out);
    else if (*permtest) cmd_permtest(g, split_a, split_b, values_a, values_b, out);
    else if (*refine) cmd_refine(g, drop_percent, rank_by, order, sizes, false, out);
    else if (*resplit) cmd_refine(g, 0.0, "pct", "pool-then-drop", sizes, true, out);
    else if (*sari) cmd_sari(g, source, output, refs, per_sentence, out);
    else if (*sari_perm) cmd_sari_permtest(g, source, output, output_b, refs, out);
  } catch (const Error& e) {
    err << "tsdiag: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "tsdiag: IoError: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "tsdiag: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace tsdiag::cli
