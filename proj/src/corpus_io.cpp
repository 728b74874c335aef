#include "tsdiag/corpus_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "tsdiag/error.hpp"

namespace tsdiag {

namespace fs = std::filesystem;

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LineCountMismatch: return "LineCountMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EncodingError: return "EncodingError";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::OutOfRangeValue: return "OutOfRangeValue";
    case ErrorCode::BinMismatch: return "BinMismatch";
    case ErrorCode::UnknownSplit: return "UnknownSplit";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::NoReferences: return "NoReferences";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

std::string TokenSeq::join() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

TokenSeq make_tokens(std::initializer_list<std::string_view> tokens) {
  TokenSeq seq;
  for (auto t : tokens) seq.tokens.emplace_back(t);
  return seq;
}

const Split& Dataset::split(const std::string& split_name) const {
  auto it = splits.find(split_name);
  if (it == splits.end())
    throw Error(ErrorCode::UnknownSplit,
                "dataset '" + name + "' has no split '" + split_name + "'");
  return it->second;
}

void Dataset::add_split(Split split) {
  std::string key = split.name;
  splits.insert_or_assign(std::move(key), std::move(split));
}

std::size_t Dataset::total_pairs() const {
  std::size_t n = 0;
  for (const auto& [_, s] : splits) n += s.size();
  return n;
}

std::vector<std::string> Dataset::ordered_split_names() const {
  std::vector<std::string> names;
  for (const char* canonical : {"train", "dev", "test"})
    if (has_split(canonical)) names.emplace_back(canonical);
  for (const auto& [key, _] : splits)
    if (key != "train" && key != "dev" && key != "test") names.push_back(key);
  return names;
}

void LoadReport::merge(const LoadReport& other) {
  empty_source_lines.insert(empty_source_lines.end(),
                            other.empty_source_lines.begin(),
                            other.empty_source_lines.end());
  empty_target_lines.insert(empty_target_lines.end(),
                            other.empty_target_lines.begin(),
                            other.empty_target_lines.end());
  warnings.insert(warnings.end(), other.warnings.begin(),
                  other.warnings.end());
}

TsvColumns TsvColumns::parse(std::string_view spec) {
  TsvColumns cols{};
  std::set<std::string> seen;
  std::size_t index = 0;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto comma = spec.find(',', start);
    if (comma == std::string_view::npos) comma = spec.size();
    std::string field(spec.substr(start, comma - start));
    field.erase(0, field.find_first_not_of(" \t"));
    field.erase(field.find_last_not_of(" \t") + 1);
    if (field == "label") cols.label = index;
    else if (field == "source") cols.source = index;
    else if (field == "target") cols.target = index;
    else if (!field.empty() && field != "-" && field != "skip")
      throw Error(ErrorCode::InvalidArgument,
                  "unknown TSV column name '" + field + "'");
    if (!field.empty()) seen.insert(field);
    ++index;
    start = comma + 1;
  }
  for (const char* required : {"label", "source", "target"})
    if (!seen.count(required))
      throw Error(ErrorCode::InvalidArgument,
                  std::string("TSV column order lacks '") + required + "'");
  return cols;
}

bool is_valid_utf8(std::string_view bytes) noexcept {
  const auto* s = reinterpret_cast<const std::uint8_t*>(bytes.data());
  const auto length = static_cast<std::int32_t>(bytes.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

TokenSeq normalize_line(std::string_view raw_line) {
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw_line.data(), static_cast<std::int32_t>(raw_line.size())));
  text.foldCase(U_FOLD_CASE_DEFAULT);

  TokenSeq seq;
  std::int32_t i = 0;
  const std::int32_t length = text.length();
  while (i < length) {
    while (i < length && u_isUWhiteSpace(text.char32At(i)))
      i = text.moveIndex32(i, 1);
    if (i >= length) break;
    std::int32_t begin = i;
    while (i < length && !u_isUWhiteSpace(text.char32At(i)))
      i = text.moveIndex32(i, 1);
    std::string token;
    text.tempSubStringBetween(begin, i).toUTF8String(token);
    seq.tokens.push_back(std::move(token));
  }
  return seq;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad())
    throw Error(ErrorCode::IoError, "read failure on '" + path.string() + "'");
  std::string content = std::move(buffer).str();

  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    auto nl = content.find('\n', start);
    if (nl == std::string::npos) nl = content.size();
    std::string line = content.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!is_valid_utf8(line))
      throw Error(ErrorCode::EncodingError,
                  "invalid UTF-8 in '" + path.string() + "' line " +
                      std::to_string(lines.size() + 1));
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  return lines;
}

namespace {

void note_empty(const SentencePair& pair, LoadReport* report) {
  if (!report) return;
  if (pair.source.empty()) report->empty_source_lines.push_back(pair.origin_line);
  if (pair.target.empty()) report->empty_target_lines.push_back(pair.origin_line);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

}  // namespace

Split load_parallel(const fs::path& source_path, const fs::path& target_path,
                    const std::string& name, LoadReport* report) {
  auto src = read_lines(source_path);
  auto tgt = read_lines(target_path);
  if (src.size() != tgt.size())
    throw Error(ErrorCode::LineCountMismatch,
                "'" + source_path.string() + "' has " +
                    std::to_string(src.size()) + " lines but '" +
                    target_path.string() + "' has " +
                    std::to_string(tgt.size()));
  Split split{name, {}};
  split.pairs.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    split.pairs.push_back({normalize_line(src[i]), normalize_line(tgt[i]), i});
    note_empty(split.pairs.back(), report);
  }
  return split;
}

Split load_labeled_tsv(const fs::path& path, const std::string& keep_label,
                       const std::string& name, TsvColumns columns,
                       LoadReport* report) {
  auto lines = read_lines(path);
  const std::size_t needed =
      std::max({columns.label, columns.source, columns.target}) + 1;
  Split split{name, {}};
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto fields = split_tabs(lines[i]);
    if (fields.size() < needed)
      throw Error(ErrorCode::MissingColumn,
                  "'" + path.string() + "' line " + std::to_string(i + 1) +
                      " has " + std::to_string(fields.size()) +
                      " columns, expected at least " + std::to_string(needed));
    if (fields[columns.label] != keep_label) continue;
    split.pairs.push_back({normalize_line(fields[columns.source]),
                           normalize_line(fields[columns.target]), i});
    note_empty(split.pairs.back(), report);
  }
  if (split.empty() && report)
    report->warnings.push_back("no rows labeled '" + keep_label + "' in '" +
                               path.string() + "'");
  return split;
}

MultiRefSet load_multi_reference(const fs::path& source_path,
                                 const std::vector<fs::path>& ref_paths) {
  if (ref_paths.empty())
    throw Error(ErrorCode::NoReferences, "no reference files given");
  auto src = read_lines(source_path);
  MultiRefSet set;
  set.sources.reserve(src.size());
  for (const auto& line : src) set.sources.push_back(normalize_line(line));
  set.references.resize(src.size());
  for (const auto& ref_path : ref_paths) {
    auto ref = read_lines(ref_path);
    if (ref.size() != src.size())
      throw Error(ErrorCode::LineCountMismatch,
                  "reference '" + ref_path.string() + "' has " +
                      std::to_string(ref.size()) + " lines, source has " +
                      std::to_string(src.size()));
    for (std::size_t i = 0; i < ref.size(); ++i)
      set.references[i].push_back(normalize_line(ref[i]));
  }
  return set;
}

std::vector<fs::path> write_split(const Split& split, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec)
    throw Error(ErrorCode::IoError,
                "cannot create '" + directory.string() + "': " + ec.message());
  const fs::path src_path = directory / (split.name + ".src");
  const fs::path tgt_path = directory / (split.name + ".tgt");
  std::ofstream src(src_path, std::ios::binary);
  std::ofstream tgt(tgt_path, std::ios::binary);
  if (!src || !tgt)
    throw Error(ErrorCode::IoError,
                "cannot write split '" + split.name + "' to '" +
                    directory.string() + "'");
  for (const auto& pair : split.pairs) {
    src << pair.source.join() << '\n';
    tgt << pair.target.join() << '\n';
  }
  src.close();
  tgt.close();
  if (!src || !tgt)
    throw Error(ErrorCode::IoError, "write failure in '" + directory.string() + "'");
  return {src_path, tgt_path};
}

namespace {

std::string trim(std::string s) {
  const char* ws = " \t\r";
  s.erase(0, s.find_first_not_of(ws));
  auto last = s.find_last_not_of(ws);
  s.erase(last == std::string::npos ? 0 : last + 1);
  return s;
}

}  // namespace

Manifest parse_manifest(const fs::path& path) {
  auto lines = read_lines(path);
  Manifest m;
  m.path = path;
  m.name = path.stem().string();
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& value) {
    fs::path p(value);
    return p.is_absolute() ? p : base / p;
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    auto where = "'" + path.string() + "' line " + std::to_string(i + 1);
    if (eq == std::string::npos)
      throw Error(ErrorCode::InvalidArgument, where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "name") {
      m.name = value;
      continue;
    }
    auto dot = key.rfind('.');
    if (dot == std::string::npos || dot == 0)
      throw Error(ErrorCode::InvalidArgument, where + ": unknown key '" + key + "'");
    auto& entry = m.splits[key.substr(0, dot)];
    std::string field = key.substr(dot + 1);
    if (field == "src") entry.src = resolve(value);
    else if (field == "tgt") entry.tgt = resolve(value);
    else if (field == "tsv") entry.tsv = resolve(value);
    else if (field == "label") entry.label = value;
    else if (field == "columns") entry.columns = TsvColumns::parse(value);
    else if (field == "refs") {
      std::istringstream words(value);
      std::string word;
      while (words >> word) entry.refs.push_back(resolve(word));
    } else {
      throw Error(ErrorCode::InvalidArgument, where + ": unknown key '" + key + "'");
    }
  }

  for (const auto& [split_name, e] : m.splits) {
    bool parallel = !e.src.empty() && !e.tgt.empty();
    bool multi = !e.src.empty() && !e.refs.empty();
    bool tsv = !e.tsv.empty();
    if (int(parallel) + int(multi) + int(tsv) != 1)
      throw Error(ErrorCode::InvalidArgument,
                  "'" + path.string() + "': split '" + split_name +
                      "' needs exactly one of src+tgt, src+refs or tsv");
  }
  if (m.splits.empty())
    throw Error(ErrorCode::EmptyDataset, "'" + path.string() + "' lists no splits");
  return m;
}

Dataset load_dataset(const Manifest& manifest, LoadReport* report) {
  Dataset ds{manifest.name, {}};
  for (const auto& [split_name, e] : manifest.splits) {
    if (!e.tsv.empty()) {
      ds.add_split(load_labeled_tsv(e.tsv, e.label, split_name, e.columns, report));
    } else if (!e.refs.empty()) {
      auto set = load_multi_reference(e.src, e.refs);
      Split split{split_name, {}};
      for (std::size_t i = 0; i < set.size(); ++i)
        for (const auto& ref : set.references[i]) {
          split.pairs.push_back({set.sources[i], ref, i});
          note_empty(split.pairs.back(), report);
        }
      ds.add_split(std::move(split));
    } else {
      ds.add_split(load_parallel(e.src, e.tgt, split_name, report));
    }
  }
  return ds;
}

Dataset load_dataset(const fs::path& manifest_path, LoadReport* report) {
  return load_dataset(parse_manifest(manifest_path), report);
}

std::vector<fs::path> write_dataset(const Dataset& dataset, const fs::path& directory) {
  std::vector<fs::path> written;
  std::ostringstream manifest;
  manifest << "name = " << dataset.name << '\n';
  for (const auto& split_name : dataset.ordered_split_names()) {
    auto paths = write_split(dataset.split(split_name), directory);
    written.insert(written.end(), paths.begin(), paths.end());
    manifest << split_name << ".src = " << split_name << ".src\n"
             << split_name << ".tgt = " << split_name << ".tgt\n";
  }
  const fs::path manifest_path = directory / "dataset.manifest";
  std::ofstream out(manifest_path, std::ios::binary);
  out << manifest.str();
  if (!out)
    throw Error(ErrorCode::IoError, "cannot write '" + manifest_path.string() + "'");
  written.push_back(manifest_path);
  return written;
}

}  // namespace tsdiag
