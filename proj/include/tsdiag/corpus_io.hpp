#pragma once

// Loading, normalizing and writing parallel simplification corpora.

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tsdiag {

// Lowercased, whitespace-free tokens of one sentence.
struct TokenSeq {
  std::vector<std::string> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }

  // Tokens joined by single spaces.
  std::string join() const;

  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
  friend auto operator<=>(const TokenSeq&, const TokenSeq&) = default;
};

TokenSeq make_tokens(std::initializer_list<std::string_view> tokens);

struct SentencePair {
  TokenSeq source;  // complex side
  TokenSeq target;  // simple side
  std::size_t origin_line = 0;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

struct Split {
  std::string name;
  std::vector<SentencePair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }

  friend bool operator==(const Split&, const Split&) = default;
};

struct Dataset {
  std::string name;
  std::map<std::string, Split> splits;

  bool has_split(const std::string& split_name) const {
    return splits.count(split_name) != 0;
  }
  // Throws UnknownSplit.
  const Split& split(const std::string& split_name) const;
  void add_split(Split split);
  std::size_t total_pairs() const;

  // train, dev, test first, then any custom labels alphabetically.
  std::vector<std::string> ordered_split_names() const;
};

struct MultiRefSet {
  std::vector<TokenSeq> sources;
  std::vector<std::vector<TokenSeq>> references;  // references[i][j]

  std::size_t size() const noexcept { return sources.size(); }
};

// Non-fatal observations made while loading.
struct LoadReport {
  std::vector<std::size_t> empty_source_lines;
  std::vector<std::size_t> empty_target_lines;
  std::vector<std::string> warnings;

  void merge(const LoadReport& other);
};

// Column layout of a labeled TSV file, 0-based.
struct TsvColumns {
  std::size_t label = 0;
  std::size_t source = 1;
  std::size_t target = 2;

  // Parses "label,source,target" style orderings.
  static TsvColumns parse(std::string_view spec);
};

// Lowercase (full Unicode case folding) and split on runs of Unicode
// whitespace. Invalid UTF-8 sequences are replaced by U+FFFD.
TokenSeq normalize_line(std::string_view raw_line);

// Returns true iff `bytes` is well-formed UTF-8.
bool is_valid_utf8(std::string_view bytes) noexcept;

// Reads `path` into lines. A final '\n' does not produce an extra empty
// line; a trailing '\r' on each line is dropped. Throws IoError and
// EncodingError.
std::vector<std::string> read_lines(const std::filesystem::path& path);

Split load_parallel(const std::filesystem::path& source_path,
                    const std::filesystem::path& target_path,
                    const std::string& name, LoadReport* report = nullptr);

Split load_labeled_tsv(const std::filesystem::path& path,
                       const std::string& keep_label,
                       const std::string& name = "custom",
                       TsvColumns columns = {},
                       LoadReport* report = nullptr);

MultiRefSet load_multi_reference(
    const std::filesystem::path& source_path,
    const std::vector<std::filesystem::path>& ref_paths);

// Writes <dir>/<name>.src and <dir>/<name>.tgt; creates `directory` when
// missing. Returns the two paths.
std::vector<std::filesystem::path> write_split(
    const Split& split, const std::filesystem::path& directory);

// Dataset manifest: "key = value" lines, '#' comments. Recognised keys:
//
//   name = wikilarge
//   <split>.src / <split>.tgt    plain parallel files
//   <split>.tsv                  labeled TSV file
//   <split>.label                label to keep (default "aligned")
//   <split>.columns              TSV column order (default label,source,target)
//   <split>.refs                 whitespace-separated reference files; each
//                                source line is paired with every reference
//
// Relative paths are resolved against the manifest's directory.
struct ManifestEntry {
  std::filesystem::path src;
  std::filesystem::path tgt;
  std::filesystem::path tsv;
  std::string label = "aligned";
  TsvColumns columns;
  std::vector<std::filesystem::path> refs;
};

struct Manifest {
  std::string name;
  std::filesystem::path path;
  std::map<std::string, ManifestEntry> splits;
};

Manifest parse_manifest(const std::filesystem::path& path);
Dataset load_dataset(const Manifest& manifest, LoadReport* report = nullptr);
Dataset load_dataset(const std::filesystem::path& manifest_path,
                     LoadReport* report = nullptr);

// Writes every split plus a manifest named `dataset.manifest` that
// load_dataset can read back. Returns all written paths.
std::vector<std::filesystem::path> write_dataset(
    const Dataset& dataset, const std::filesystem::path& directory);

}  // namespace tsdiag
