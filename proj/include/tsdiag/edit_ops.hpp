#pragma once

// Token-level edit distance with an explicit edit script, MOVE
// reclassification, and per-pair change profiles.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsdiag/corpus_io.hpp"

namespace tsdiag {

enum class EditKind : std::uint8_t { Keep, Insert, Delete, Replace, Move };

inline constexpr std::size_t kEditKindCount = 5;

std::string_view to_string(EditKind kind);

struct EditOp {
  EditKind kind = EditKind::Keep;
  std::optional<std::size_t> src_pos;
  std::optional<std::size_t> tgt_pos;
  std::string token;        // kept, deleted, inserted, moved, or replaced-away token
  std::string replacement;  // REPLACE only

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct EditScript {
  std::vector<EditOp> ops;
  std::size_t distance = 0;

  std::size_t count(EditKind kind) const;
};

struct ChangeProfile {
  std::size_t raw_distance = 0;
  double normalized_pct = 0.0;
  std::array<std::size_t, kEditKindCount> counts{};
  std::size_t src_len = 0;
  std::size_t tgt_len = 0;
  std::ptrdiff_t len_diff = 0;  // tgt_len - src_len

  std::size_t count(EditKind kind) const {
    return counts[static_cast<std::size_t>(kind)];
  }

  friend bool operator==(const ChangeProfile&, const ChangeProfile&) = default;
};

// Unit-cost Levenshtein distance only (two-row DP, no script).
std::size_t edit_distance_value(const TokenSeq& source, const TokenSeq& target);

// Minimal script under unit costs. Backtrace prefers the diagonal
// (KEEP/REPLACE), then DELETE, then INSERT.
EditScript edit_distance(const TokenSeq& source, const TokenSeq& target);

// Pairs each DELETE, left to right, with the leftmost unpaired INSERT of the
// same token and replaces the pair by a single MOVE at the DELETE's place.
EditScript detect_moves(EditScript script);

// Rebuilds the target from `source` and `script`. Returns nullopt when the
// script does not consume every source position exactly once, leaves a
// target position empty or unfilled twice, or disagrees with the source.
std::optional<TokenSeq> replay(const TokenSeq& source, const EditScript& script);

// min(100, 100 * distance / src_len); an empty source scores 100 when the
// target is non-empty and 0 otherwise.
double normalized_change(std::size_t distance, std::size_t src_len,
                         std::size_t tgt_len) noexcept;

ChangeProfile change_profile(const SentencePair& pair);

// One profile per pair, in pair order. Throws EmptySplit.
std::vector<ChangeProfile> profile_split(const Split& split);
std::vector<ChangeProfile> profile_split_serial(const Split& split);

// Normalized change percentages, one per profile.
std::vector<double> change_percentages(std::span<const ChangeProfile> profiles);

// CSV with header
// index,raw_distance,normalized_pct,keep,insert,delete,replace,move,src_len,tgt_len,len_diff
void write_profiles_csv(std::ostream& out, std::span<const ChangeProfile> profiles);

// Shortest round-trip decimal representation when `precision` < 0,
// otherwise fixed notation with that many digits.
std::string format_double(double value, int precision = -1);

}  // namespace tsdiag
