#include "iotmonitor/sequence_analysis.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "iotmonitor/error.hpp"

namespace iotmonitor {

LabelSequence lcs(std::span<const std::string> a, std::span<const std::string> b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  // suffix[i][j] = LCS length of a[i..] and b[j..]
  std::vector<std::size_t> suffix((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return suffix[i * (m + 1) + j]; };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      at(i, j) = a[i] == b[j] ? at(i + 1, j + 1) + 1 : std::max(at(i + 1, j), at(i, j + 1));
    }
  }

  LabelSequence out;
  out.reserve(at(0, 0));
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n && j < m) {
    if (a[i] == b[j]) {
      out.push_back(a[i]);
      ++i;
      ++j;
    } else if (at(i + 1, j) >= at(i, j + 1)) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

ScoreTable::ScoreTable(LabelSequence original) : original_(std::move(original)) {}

std::size_t ScoreTable::count(const LabelPair& pair) const {
  auto it = counts_.find(pair);
  return it == counts_.end() ? 0 : it->second;
}

ScoreTable score_pairs(const LabelSequence& original,
                       const std::vector<LabelSequence>& extracted) {
  if (original.empty()) throw ArgumentError("original chain must be non-empty");
  ScoreTable table(original);
  for (const LabelSequence& sequence : extracted) {
    const LabelSequence common = lcs(original, sequence);
    for (std::size_t j = 0; j + 1 < common.size(); ++j) table.add({common[j], common[j + 1]});
  }
  return table;
}

CrucialResult crucial_pairs(const ScoreTable& table) {
  if (table.empty()) throw EmptyInputError("score table is empty");
  CrucialResult result;
  for (const auto& [pair, count] : table.counts()) result.max_count = std::max(result.max_count, count);
  for (const auto& [pair, count] : table.counts()) {
    if (count == result.max_count) result.pairs.push_back(pair);
  }

  const LabelSequence& original = table.original();
  auto position = [&original](const std::string& label) {
    auto it = std::find(original.begin(), original.end(), label);
    return static_cast<std::size_t>(it - original.begin());
  };
  std::stable_sort(result.pairs.begin(), result.pairs.end(),
                   [&](const LabelPair& x, const LabelPair& y) {
                     return std::pair(position(x.first), position(x.second)) <
                            std::pair(position(y.first), position(y.second));
                   });
  return result;
}

void write_crucial_report(std::ostream& out, const ScoreTable& table,
                          const CrucialResult& result) {
  out << "pair scores:\n";
  for (const auto& [pair, count] : table.counts()) {
    out << "  " << pair.first << " -> " << pair.second << ": " << count << '\n';
  }
  out << "crucial pairs (score " << result.max_count << "):\n";
  for (const auto& pair : result.pairs) out << "  " << pair.first << " -> " << pair.second << '\n';
}

void write_crucial_csv(std::ostream& out, const ScoreTable& table, const CrucialResult& result) {
  out << "first,second,count,crucial\n";
  for (const auto& [pair, count] : table.counts()) {
    const bool crucial =
        std::find(result.pairs.begin(), result.pairs.end(), pair) != result.pairs.end();
    out << pair.first << ',' << pair.second << ',' << count << ',' << (crucial ? 1 : 0) << '\n';
  }
}

double f_score(std::span<const std::size_t> truth, std::span<const std::size_t> decoded) {
  if (truth.size() != decoded.size()) {
    throw DimensionError("truth and decoded sequences differ in length");
  }
  if (truth.empty()) throw EmptyInputError("cannot score empty sequences");

  // Each mismatch is one false positive (decoded label) and one false
  // negative (true label).
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (truth[t] == decoded[t]) {
      ++tp;
    } else {
      ++fp;
      ++fn;
    }
  }
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

std::vector<std::size_t> align_states(std::span<const std::size_t> truth,
                                      std::span<const std::size_t> decoded,
                                      std::size_t state_count) {
  if (truth.size() != decoded.size()) {
    throw DimensionError("truth and decoded sequences differ in length");
  }
  const std::size_t n = state_count;
  std::vector<long long> agree(n * n, 0);
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (truth[t] >= n || decoded[t] >= n) throw DimensionError("state index out of range");
    ++agree[decoded[t] * n + truth[t]];
  }

  // Hungarian algorithm (potentials form), rows = decoded states, columns =
  // truth labels, cost = -agreement. Arrays are 1-based; column 0 is a sentinel.
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0), v(n + 1, 0), way_min(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::fill(way_min.begin(), way_min.end(), kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t r = match[col0];
      long long delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const long long cur = -agree[(r - 1) * n + (c - 1)] - u[r] - v[c];
        if (cur < way_min[c]) {
          way_min[c] = cur;
          way[c] = col0;
        }
        if (way_min[c] < delta) {
          delta = way_min[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          way_min[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<std::size_t> mapping(n, 0);
  for (std::size_t c = 1; c <= n; ++c) mapping[match[c] - 1] = c - 1;
  return mapping;
}

}  // namespace iotmonitor
