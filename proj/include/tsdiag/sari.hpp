#pragma once

// SARI for simplification outputs against one or more references.
//
// Variant "sari-original": keep and add are F1 scores, delete is precision
// only. Keep and delete use reference-count weighting (source and output
// n-gram counts are multiplied by the number of references before being
// compared with summed reference counts); add works on n-gram sets.
//
// At each order n = 1..4 a component is skipped when both the sets behind
// its numerator and denominator are empty (nothing to keep/add/delete and
// nothing that should have been). A component averages over its
// non-skipped orders; one skipped at every order scores 100.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsdiag/corpus_io.hpp"

namespace tsdiag {

inline constexpr std::size_t kSariMaxOrder = 4;
inline constexpr const char* kSariVariant = "sari-original";

using NgramCounts = std::map<std::string, std::size_t>;

// Contiguous n-grams (tokens joined by a single space) with multiplicity.
NgramCounts ngram_multiset(const TokenSeq& tokens, std::size_t n);

struct SariOrderScores {
  std::optional<double> add;   // F1, in [0, 100]; nullopt when skipped
  std::optional<double> keep;  // F1
  std::optional<double> del;   // precision
};

struct SariScore {
  double sari = 0.0;
  double f_add = 0.0;
  double f_keep = 0.0;
  double p_del = 0.0;
  std::array<SariOrderScores, kSariMaxOrder> per_n{};
};

// Throws NoReferences.
SariScore sari_sentence(const TokenSeq& source, const TokenSeq& output,
                        std::span<const TokenSeq> references);

struct SariCorpusScore {
  SariScore mean;                     // macro-average over sentences
  std::vector<SariScore> sentences;   // per-sentence scores, input order
};

// Throws LengthMismatch and NoReferences.
SariCorpusScore sari_corpus(std::span<const TokenSeq> sources,
                            std::span<const TokenSeq> outputs,
                            std::span<const std::vector<TokenSeq>> reference_sets);
SariCorpusScore sari_corpus_serial(std::span<const TokenSeq> sources,
                                   std::span<const TokenSeq> outputs,
                                   std::span<const std::vector<TokenSeq>> reference_sets);

// Pairwise summation over `values` in index order, divided by the count.
double stable_mean(std::span<const double> values);

// CSV with header index,sari,f_add,f_keep,p_del
void write_sari_csv(std::ostream& out, std::span<const SariScore> scores);

}  // namespace tsdiag
