#ifndef IOTMONITOR_HARNESS_HPP
#define IOTMONITOR_HARNESS_HPP

// End-to-end pipeline: verified trace -> HMM training -> Viterbi decoding
// -> scoring, plus the window x length evaluation grid and crucial-node
// detection over repeated attempts.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "iotmonitor/hmm.hpp"
#include "iotmonitor/sequence_analysis.hpp"
#include "iotmonitor/trace.hpp"

namespace iotmonitor {

inline constexpr std::size_t kMinVerifiedEvents = 2;

struct RunOptions {
  std::uint64_t seed = 42;
  TrainOptions train;
  /// Independent initializations; the trained model with the highest final
  /// log-likelihood is kept (earliest wins ties). Restart 0 uses `seed`.
  std::size_t restarts = 1;
};

/// Seed of restart `index` derived from the base seed; restart_seed(s, 0) == s.
std::uint64_t restart_seed(std::uint64_t seed, std::size_t index);

struct PipelineResult {
  EncodedSequence encoded;
  HmmModel model;
  TrainReport report;  // of the selected restart
  std::size_t total_iterations = 0;  // summed over restarts
  DecodedPath path;
  /// Hidden state index -> state-space label index (see align_states).
  std::vector<std::size_t> state_mapping;
  /// The decoded path expressed in state-space label indices.
  std::vector<std::size_t> decoded;
  LabelSequence decoded_labels;
  double f1 = 0.0;
  double estimation_time_s = 0.0;
  double decoding_time_ms = 0.0;

  /// Unique observation symbols per unique true state (K / N).
  double obs_state_ratio() const {
    return static_cast<double>(encoded.alphabet.size()) /
           static_cast<double>(encoded.states.size());
  }
};

/// Throws InsufficientDataError when fewer than two verified events remain.
/// Only training (all restarts) and decoding are timed.
PipelineResult run_pipeline(const VerifiedSequence& sequence, const RunOptions& options);

struct GridConfig {
  std::int64_t window_start_ms = 105;
  std::int64_t window_stop_ms = 200;
  std::int64_t window_step_ms = 5;
  std::vector<std::size_t> sequence_lengths = default_lengths();
  std::size_t runs_per_cell = 10;
  RunOptions run;

  static std::vector<std::size_t> default_lengths();
};

/// Throws ArgumentError when a field violates its invariants.
void validate(const GridConfig& config);

/// start, start + step, ... up to and including stop.
std::vector<std::int64_t> window_sizes(const GridConfig& config);

/// Parses "start:stop:step".
void parse_window_range(std::string_view text, GridConfig& config);

/// Parses "a:b" (inclusive range) or a comma-separated list.
std::vector<std::size_t> parse_lengths(std::string_view text);

struct CellMetrics {
  double mean_estimation_time_s = 0.0;
  double mean_decoding_time_ms = 0.0;
  std::size_t iterations = 0;
  double obs_state_ratio = 0.0;
  double f1 = 0.0;
};

struct GridCellResult {
  std::int64_t window_ms = 0;
  std::size_t sequence_length = 0;
  /// Empty when fewer than `sequence_length` (or fewer than two) verified
  /// events are available for the window.
  std::optional<CellMetrics> metrics;
};

/// Cells in (window, length) order.
std::vector<GridCellResult> run_grid(const TraceRecords& trace, const GridConfig& config,
                                     const VerificationMap& required = {});

/// Header: window_ms,length,est_time_s,dec_time_ms,iterations,obs_state_ratio,f1
void write_grid_csv(std::ostream& out, const std::vector<GridCellResult>& cells);

/// Pivot of F1 with one row per window and one column per length.
void write_heatmap_csv(std::ostream& out, const std::vector<GridCellResult>& cells);

struct DetectionReport {
  LabelSequence original;
  std::vector<LabelSequence> extracted;
  ScoreTable table;
  CrucialResult crucial;
};

/// Scores `extracted` against `original` and picks the crucial pairs.
DetectionReport detect_from_sequences(LabelSequence original,
                                      std::vector<LabelSequence> extracted);

/// Runs the pipeline `attempts` times with seeds seed, seed + 1, ... and
/// scores the decoded label sequences against the unique event chain in
/// first-appearance order.
DetectionReport detect_crucial_nodes(const VerifiedSequence& sequence, std::size_t attempts,
                                     const RunOptions& options);

}  // namespace iotmonitor

#endif  // IOTMONITOR_HARNESS_HPP
