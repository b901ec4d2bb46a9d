#ifndef IOTMONITOR_SEQUENCE_ANALYSIS_HPP
#define IOTMONITOR_SEQUENCE_ANALYSIS_HPP

// Crucial-node detection over decoded event sequences, plus accuracy scoring.

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace iotmonitor {

using LabelSequence = std::vector<std::string>;

/// A longest common subsequence of `a` and `b`. The backtrace takes a match
/// whenever the heads agree and otherwise advances in `a` when that keeps
/// the optimal length, so equal-length candidates resolve deterministically.
LabelSequence lcs(std::span<const std::string> a, std::span<const std::string> b);

/// An ordered transition (first -> second) between two states.
struct LabelPair {
  std::string first;
  std::string second;

  friend auto operator<=>(const LabelPair&, const LabelPair&) = default;
};

/// Occurrence counts of adjacent pairs across LCS-reduced sequences.
class ScoreTable {
 public:
  explicit ScoreTable(LabelSequence original);

  void add(const LabelPair& pair) { ++counts_[pair]; }
  std::size_t count(const LabelPair& pair) const;
  const std::map<LabelPair, std::size_t>& counts() const noexcept { return counts_; }
  const LabelSequence& original() const noexcept { return original_; }
  bool empty() const noexcept { return counts_.empty(); }

 private:
  LabelSequence original_;
  std::map<LabelPair, std::size_t> counts_;
};

/// For each extracted sequence, counts every adjacent pair of its LCS with
/// `original`. Throws ArgumentError for an empty original.
ScoreTable score_pairs(const LabelSequence& original,
                       const std::vector<LabelSequence>& extracted);

struct CrucialResult {
  std::vector<LabelPair> pairs;
  std::size_t max_count = 0;
};

/// All pairs tied at the maximum count, ordered by where their labels first
/// appear in the original chain. Throws EmptyInputError for an empty table.
CrucialResult crucial_pairs(const ScoreTable& table);

/// Human-readable report: every pair with its count, then the winners.
void write_crucial_report(std::ostream& out, const ScoreTable& table,
                          const CrucialResult& result);

/// Machine-readable report with header `first,second,count,crucial`.
void write_crucial_csv(std::ostream& out, const ScoreTable& table,
                       const CrucialResult& result);

/// Positional micro-averaged F1 (equal to positional accuracy).
/// Throws DimensionError on length mismatch, EmptyInputError when empty.
double f_score(std::span<const std::size_t> truth, std::span<const std::size_t> decoded);

/// One-to-one map from decoded hidden-state index to truth label index that
/// maximizes positional agreement (Hungarian assignment). Both sequences use
/// indices below `state_count`; the result has `state_count` entries.
std::vector<std::size_t> align_states(std::span<const std::size_t> truth,
                                      std::span<const std::size_t> decoded,
                                      std::size_t state_count);

}  // namespace iotmonitor

#endif  // IOTMONITOR_SEQUENCE_ANALYSIS_HPP
