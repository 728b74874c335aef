#include "tsdiag/edit_ops.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

#include "tsdiag/error.hpp"

namespace tsdiag {

std::string_view to_string(EditKind kind) {
  switch (kind) {
    case EditKind::Keep: return "KEEP";
    case EditKind::Insert: return "INSERT";
    case EditKind::Delete: return "DELETE";
    case EditKind::Replace: return "REPLACE";
    case EditKind::Move: return "MOVE";
  }
  return "?";
}

std::size_t EditScript::count(EditKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      ops.begin(), ops.end(), [kind](const EditOp& op) { return op.kind == kind; }));
}

std::size_t edit_distance_value(const TokenSeq& source, const TokenSeq& target) {
  const std::size_t n = source.size(), m = target.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = prev[j - 1] + (source[i - 1] == target[j - 1] ? 0 : 1);
      cur[j] = std::min({diag, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

EditScript edit_distance(const TokenSeq& source, const TokenSeq& target) {
  const std::size_t n = source.size(), m = target.size();
  const std::size_t width = m + 1;
  // cost[i * width + j] = distance between source[0, i) and target[0, j)
  std::vector<std::uint32_t> cost((n + 1) * width);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& {
    return cost[i * width + j];
  };
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    at(i, 0) = static_cast<std::uint32_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t diag =
          at(i - 1, j - 1) + (source[i - 1] == target[j - 1] ? 0u : 1u);
      at(i, j) = std::min({diag, at(i - 1, j) + 1u, at(i, j - 1) + 1u});
    }
  }

  EditScript script;
  script.distance = at(n, m);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = source[i - 1] == target[j - 1];
      if (at(i - 1, j - 1) + (same ? 0u : 1u) == at(i, j)) {
        EditOp op{same ? EditKind::Keep : EditKind::Replace, i - 1, j - 1,
                  source[i - 1], same ? std::string{} : target[j - 1]};
        script.ops.push_back(std::move(op));
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i - 1, j) + 1u == at(i, j)) {
      script.ops.push_back({EditKind::Delete, i - 1, std::nullopt, source[i - 1], {}});
      --i;
    } else {
      script.ops.push_back({EditKind::Insert, std::nullopt, j - 1, target[j - 1], {}});
      --j;
    }
  }
  std::reverse(script.ops.begin(), script.ops.end());
  return script;
}

EditScript detect_moves(EditScript script) {
  std::vector<bool> insert_used(script.ops.size(), false);
  std::vector<bool> drop(script.ops.size(), false);
  for (std::size_t d = 0; d < script.ops.size(); ++d) {
    auto& del = script.ops[d];
    if (del.kind != EditKind::Delete) continue;
    for (std::size_t k = 0; k < script.ops.size(); ++k) {
      const auto& ins = script.ops[k];
      if (ins.kind != EditKind::Insert || insert_used[k] || ins.token != del.token)
        continue;
      insert_used[k] = true;
      drop[k] = true;
      del.kind = EditKind::Move;
      del.tgt_pos = ins.tgt_pos;
      break;
    }
  }
  std::vector<EditOp> kept;
  kept.reserve(script.ops.size());
  for (std::size_t k = 0; k < script.ops.size(); ++k)
    if (!drop[k]) kept.push_back(std::move(script.ops[k]));
  script.ops = std::move(kept);
  return script;
}

std::optional<TokenSeq> replay(const TokenSeq& source, const EditScript& script) {
  std::vector<bool> consumed(source.size(), false);
  std::vector<std::optional<std::string>> out;

  auto consume = [&](const std::optional<std::size_t>& pos,
                     const std::string& token) -> bool {
    if (!pos || *pos >= source.size() || consumed[*pos]) return false;
    if (source[*pos] != token) return false;
    consumed[*pos] = true;
    return true;
  };
  auto produce = [&](const std::optional<std::size_t>& pos, std::string token) -> bool {
    if (!pos) return false;
    if (*pos >= out.size()) out.resize(*pos + 1);
    if (out[*pos]) return false;
    out[*pos] = std::move(token);
    return true;
  };

  for (const auto& op : script.ops) {
    switch (op.kind) {
      case EditKind::Keep:
      case EditKind::Move:
        if (!consume(op.src_pos, op.token) || !produce(op.tgt_pos, op.token))
          return std::nullopt;
        break;
      case EditKind::Replace:
        if (!consume(op.src_pos, op.token) || !produce(op.tgt_pos, op.replacement))
          return std::nullopt;
        break;
      case EditKind::Delete:
        if (op.tgt_pos || !consume(op.src_pos, op.token)) return std::nullopt;
        break;
      case EditKind::Insert:
        if (op.src_pos || !produce(op.tgt_pos, op.token)) return std::nullopt;
        break;
    }
  }
  if (std::find(consumed.begin(), consumed.end(), false) != consumed.end())
    return std::nullopt;
  TokenSeq target;
  target.tokens.reserve(out.size());
  for (auto& token : out) {
    if (!token) return std::nullopt;
    target.tokens.push_back(std::move(*token));
  }
  return target;
}

double normalized_change(std::size_t distance, std::size_t src_len,
                         std::size_t tgt_len) noexcept {
  if (src_len == 0) return tgt_len == 0 ? 0.0 : 100.0;
  const double pct = 100.0 * static_cast<double>(distance) / static_cast<double>(src_len);
  return std::min(100.0, pct);
}

ChangeProfile change_profile(const SentencePair& pair) {
  EditScript script = edit_distance(pair.source, pair.target);
  ChangeProfile profile;
  profile.raw_distance = script.distance;
  script = detect_moves(std::move(script));
  for (const auto& op : script.ops) ++profile.counts[static_cast<std::size_t>(op.kind)];
  profile.src_len = pair.source.size();
  profile.tgt_len = pair.target.size();
  profile.len_diff = static_cast<std::ptrdiff_t>(profile.tgt_len) -
                     static_cast<std::ptrdiff_t>(profile.src_len);
  profile.normalized_pct =
      normalized_change(profile.raw_distance, profile.src_len, profile.tgt_len);
  return profile;
}

namespace {

void require_non_empty(const Split& split) {
  if (split.empty())
    throw Error(ErrorCode::EmptySplit, "split '" + split.name + "' has no pairs");
}

}  // namespace

std::vector<ChangeProfile> profile_split_serial(const Split& split) {
  require_non_empty(split);
  std::vector<ChangeProfile> profiles;
  profiles.reserve(split.size());
  for (const auto& pair : split.pairs) profiles.push_back(change_profile(pair));
  return profiles;
}

std::vector<ChangeProfile> profile_split(const Split& split) {
  require_non_empty(split);
  std::vector<ChangeProfile> profiles(split.size());
  const auto n = static_cast<std::ptrdiff_t>(split.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    profiles[static_cast<std::size_t>(i)] =
        change_profile(split.pairs[static_cast<std::size_t>(i)]);
  return profiles;
}

std::vector<double> change_percentages(std::span<const ChangeProfile> profiles) {
  std::vector<double> values;
  values.reserve(profiles.size());
  for (const auto& p : profiles) values.push_back(p.normalized_pct);
  return values;
}

std::string format_double(double value, int precision) {
  char buf[64];
  std::to_chars_result res =
      precision < 0 ? std::to_chars(buf, buf + sizeof buf, value)
                    : std::to_chars(buf, buf + sizeof buf, value,
                                    std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

void write_profiles_csv(std::ostream& out, std::span<const ChangeProfile> profiles) {
  out << "index,raw_distance,normalized_pct,keep,insert,delete,replace,move,"
         "src_len,tgt_len,len_diff\n";
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    out << i << ',' << p.raw_distance << ',' << format_double(p.normalized_pct, 6)
        << ',' << p.count(EditKind::Keep) << ',' << p.count(EditKind::Insert) << ','
        << p.count(EditKind::Delete) << ',' << p.count(EditKind::Replace) << ','
        << p.count(EditKind::Move) << ',' << p.src_len << ',' << p.tgt_len << ','
        << p.len_diff << '\n';
  }
}

}  // namespace tsdiag
