#include "tsdiag/sari.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "tsdiag/edit_ops.hpp"
#include "tsdiag/error.hpp"

namespace tsdiag {

NgramCounts ngram_multiset(const TokenSeq& tokens, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n-gram order must be >= 1");
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string gram = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      gram += ' ';
      gram += tokens[i + k];
    }
    ++counts[gram];
  }
  return counts;
}

namespace {

std::size_t lookup(const NgramCounts& counts, const std::string& gram) {
  auto it = counts.find(gram);
  return it == counts.end() ? 0 : it->second;
}

NgramCounts scaled(const NgramCounts& counts, std::size_t factor) {
  NgramCounts out;
  for (const auto& [gram, c] : counts) out.emplace(gram, c * factor);
  return out;
}

double f1(double precision, double recall) {
  if (precision <= 0.0 && recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

SariOrderScores score_order(const TokenSeq& source, const TokenSeq& output,
                            std::span<const TokenSeq> references, std::size_t n) {
  const std::size_t num_refs = references.size();
  const NgramCounts src = scaled(ngram_multiset(source, n), num_refs);
  const NgramCounts out = scaled(ngram_multiset(output, n), num_refs);
  NgramCounts ref;
  for (const auto& r : references)
    for (const auto& [gram, c] : ngram_multiset(r, n)) ref[gram] += c;

  SariOrderScores scores;

  // Keep: grams of the source retained by the output, weighted by how many
  // references retain them too.
  {
    double precision_sum = 0.0, recall_sum = 0.0;
    std::size_t kept_types = 0, keepable_types = 0;
    for (const auto& [gram, s] : src) {
      const std::size_t kept = std::min(s, lookup(out, gram));
      const std::size_t keepable = std::min(s, lookup(ref, gram));
      if (keepable > 0) ++keepable_types;
      if (kept == 0) continue;
      ++kept_types;
      const std::size_t good = std::min(kept, lookup(ref, gram));
      if (good == 0) continue;
      precision_sum += static_cast<double>(good) / static_cast<double>(kept);
      recall_sum += static_cast<double>(good) / static_cast<double>(keepable);
    }
    if (kept_types > 0 || keepable_types > 0) {
      const double p = kept_types ? precision_sum / static_cast<double>(kept_types) : 0.0;
      const double r =
          keepable_types ? recall_sum / static_cast<double>(keepable_types) : 0.0;
      scores.keep = 100.0 * f1(p, r);
    }
  }

  // Delete: grams of the source dropped by the output, credited when the
  // references drop them as well. Precision only.
  {
    double precision_sum = 0.0;
    std::size_t deleted_types = 0;
    for (const auto& [gram, s] : src) {
      const std::size_t o = lookup(out, gram);
      if (s <= o) continue;
      const std::size_t deleted = s - o;
      ++deleted_types;
      const std::size_t r = lookup(ref, gram);
      const std::size_t good = deleted > r ? deleted - r : 0;
      precision_sum += static_cast<double>(good) / static_cast<double>(deleted);
    }
    if (deleted_types > 0)
      scores.del = 100.0 * precision_sum / static_cast<double>(deleted_types);
  }

  // Add: output grams absent from the source, judged as sets.
  {
    std::size_t added = 0, added_good = 0, addable = 0;
    for (const auto& [gram, _] : out) {
      if (src.count(gram)) continue;
      ++added;
      if (ref.count(gram)) ++added_good;
    }
    for (const auto& [gram, _] : ref)
      if (!src.count(gram)) ++addable;
    if (added > 0 || addable > 0) {
      const double p = added ? static_cast<double>(added_good) / static_cast<double>(added) : 0.0;
      const double r =
          addable ? static_cast<double>(added_good) / static_cast<double>(addable) : 0.0;
      scores.add = 100.0 * f1(p, r);
    }
  }
  return scores;
}

double average_present(const std::array<SariOrderScores, kSariMaxOrder>& per_n,
                       std::optional<double> SariOrderScores::*field) {
  double sum = 0.0;
  std::size_t present = 0;
  for (const auto& s : per_n)
    if (const auto& v = s.*field) {
      sum += *v;
      ++present;
    }
  return present ? sum / static_cast<double>(present) : 100.0;
}

}  // namespace

SariScore sari_sentence(const TokenSeq& source, const TokenSeq& output,
                        std::span<const TokenSeq> references) {
  if (references.empty())
    throw Error(ErrorCode::NoReferences, "SARI needs at least one reference");
  SariScore score;
  for (std::size_t n = 1; n <= kSariMaxOrder; ++n)
    score.per_n[n - 1] = score_order(source, output, references, n);
  score.f_add = average_present(score.per_n, &SariOrderScores::add);
  score.f_keep = average_present(score.per_n, &SariOrderScores::keep);
  score.p_del = average_present(score.per_n, &SariOrderScores::del);
  score.sari = (score.f_add + score.f_keep + score.p_del) / 3.0;
  return score;
}

double stable_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  auto pairwise = [](auto&& self, std::span<const double> v) -> double {
    if (v.size() <= 8) {
      double s = 0.0;
      for (double x : v) s += x;
      return s;
    }
    const std::size_t half = v.size() / 2;
    return self(self, v.first(half)) + self(self, v.subspan(half));
  };
  return pairwise(pairwise, values) / static_cast<double>(values.size());
}

namespace {

void check_corpus(std::span<const TokenSeq> sources, std::span<const TokenSeq> outputs,
                  std::span<const std::vector<TokenSeq>> reference_sets) {
  if (sources.size() != outputs.size() || sources.size() != reference_sets.size())
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(sources.size()) + " sources, " +
                    std::to_string(outputs.size()) + " outputs, " +
                    std::to_string(reference_sets.size()) + " reference sets");
  if (sources.empty()) throw Error(ErrorCode::EmptyInput, "no sentences to score");
  for (std::size_t i = 0; i < reference_sets.size(); ++i)
    if (reference_sets[i].empty())
      throw Error(ErrorCode::NoReferences,
                  "sentence " + std::to_string(i) + " has no references");
}

SariScore mean_score(std::span<const SariScore> scores) {
  std::vector<double> column(scores.size());
  auto mean_of = [&](double SariScore::*field) {
    for (std::size_t i = 0; i < scores.size(); ++i) column[i] = scores[i].*field;
    return stable_mean(column);
  };
  SariScore mean;
  mean.sari = mean_of(&SariScore::sari);
  mean.f_add = mean_of(&SariScore::f_add);
  mean.f_keep = mean_of(&SariScore::f_keep);
  mean.p_del = mean_of(&SariScore::p_del);
  // Per-order corpus values average the sentences where the order counted.
  for (std::size_t n = 0; n < kSariMaxOrder; ++n) {
    auto per_order = [&](std::optional<double> SariOrderScores::*field)
        -> std::optional<double> {
      std::vector<double> present;
      for (const auto& s : scores)
        if (const auto& v = s.per_n[n].*field) present.push_back(*v);
      if (present.empty()) return std::nullopt;
      return stable_mean(present);
    };
    mean.per_n[n].add = per_order(&SariOrderScores::add);
    mean.per_n[n].keep = per_order(&SariOrderScores::keep);
    mean.per_n[n].del = per_order(&SariOrderScores::del);
  }
  return mean;
}

}  // namespace

SariCorpusScore sari_corpus_serial(std::span<const TokenSeq> sources,
                                   std::span<const TokenSeq> outputs,
                                   std::span<const std::vector<TokenSeq>> reference_sets) {
  check_corpus(sources, outputs, reference_sets);
  SariCorpusScore result;
  result.sentences.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i)
    result.sentences.push_back(sari_sentence(sources[i], outputs[i], reference_sets[i]));
  result.mean = mean_score(result.sentences);
  return result;
}

SariCorpusScore sari_corpus(std::span<const TokenSeq> sources,
                            std::span<const TokenSeq> outputs,
                            std::span<const std::vector<TokenSeq>> reference_sets) {
  check_corpus(sources, outputs, reference_sets);
  SariCorpusScore result;
  result.sentences.resize(sources.size());
  const auto n = static_cast<std::ptrdiff_t>(sources.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    result.sentences[k] = sari_sentence(sources[k], outputs[k], reference_sets[k]);
  }
  result.mean = mean_score(result.sentences);
  return result;
}

void write_sari_csv(std::ostream& out, std::span<const SariScore> scores) {
  out << "index,sari,f_add,f_keep,p_del\n";
  for (std::size_t i = 0; i < scores.size(); ++i)
    out << i << ',' << format_double(scores[i].sari, 6) << ','
        << format_double(scores[i].f_add, 6) << ',' << format_double(scores[i].f_keep, 6)
        << ',' << format_double(scores[i].p_del, 6) << '\n';
}

}  // namespace tsdiag
