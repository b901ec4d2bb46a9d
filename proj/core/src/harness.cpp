#include "iotmonitor/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ostream>
#include <string>

#include "iotmonitor/error.hpp"

namespace iotmonitor {

namespace {

using Clock = std::chrono::steady_clock;

template <typename T>
T parse_integer(std::string_view text, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ArgumentError(std::string("invalid ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

}  // namespace

std::uint64_t restart_seed(std::uint64_t seed, std::size_t index) {
  return seed + static_cast<std::uint64_t>(index) * 0x9E3779B97F4A7C15ULL;
}

PipelineResult run_pipeline(const VerifiedSequence& sequence, const RunOptions& options) {
  if (sequence.entries.size() < kMinVerifiedEvents) {
    throw InsufficientDataError("insufficient verified events: " +
                                std::to_string(sequence.entries.size()) +
                                " survive the window, at least " +
                                std::to_string(kMinVerifiedEvents) + " are required");
  }
  if (options.restarts < 1) throw ArgumentError("restarts must be at least 1");
  EncodedSequence encoded = build_alphabet(sequence);

  const auto train_start = Clock::now();
  std::optional<TrainResult> best;
  std::size_t total_iterations = 0;
  for (std::size_t r = 0; r < options.restarts; ++r) {
    HmmModel initial =
        init_model(encoded.states, encoded.alphabet, restart_seed(options.seed, r));
    TrainResult trained = train(std::move(initial), encoded.observations, options.train);
    total_iterations += trained.report.iterations;
    if (!best || trained.report.log_likelihood_history.back() >
                     best->report.log_likelihood_history.back()) {
      best = std::move(trained);
    }
  }
  const auto train_end = Clock::now();
  DecodedPath path = viterbi(best->model, encoded.observations);
  const auto decode_end = Clock::now();

  const std::size_t n = encoded.states.size();
  std::vector<std::size_t> mapping = align_states(encoded.truth, path.states, n);
  std::vector<std::size_t> decoded;
  LabelSequence labels;
  decoded.reserve(path.states.size());
  for (std::size_t s : path.states) {
    decoded.push_back(mapping[s]);
    labels.push_back(encoded.states.label(mapping[s]));
  }
  const double f1 = f_score(encoded.truth, decoded);

  return PipelineResult{std::move(encoded),
                        std::move(best->model),
                        std::move(best->report),
                        total_iterations,
                        std::move(path),
                        std::move(mapping),
                        std::move(decoded),
                        std::move(labels),
                        f1,
                        std::chrono::duration<double>(train_end - train_start).count(),
                        std::chrono::duration<double, std::milli>(decode_end - train_end).count()};
}

std::vector<std::size_t> GridConfig::default_lengths() {
  std::vector<std::size_t> lengths;
  for (std::size_t l = 2; l <= 30; ++l) lengths.push_back(l);
  return lengths;
}

void validate(const GridConfig& config) {
  if (config.window_step_ms <= 0) throw ArgumentError("window step must be positive");
  if (config.window_start_ms <= 0) throw ArgumentError("window sizes must be positive");
  if (config.window_start_ms > config.window_stop_ms) {
    throw ArgumentError("window start must not exceed window stop");
  }
  if (config.sequence_lengths.empty()) throw ArgumentError("no sequence lengths given");
  for (std::size_t l : config.sequence_lengths) {
    if (l < kMinVerifiedEvents) throw ArgumentError("sequence lengths must be at least 2");
  }
  if (config.runs_per_cell < 1) throw ArgumentError("runs per cell must be at least 1");
}

std::vector<std::int64_t> window_sizes(const GridConfig& config) {
  validate(config);
  std::vector<std::int64_t> windows;
  for (std::int64_t w = config.window_start_ms; w <= config.window_stop_ms;
       w += config.window_step_ms) {
    windows.push_back(w);
  }
  return windows;
}

void parse_window_range(std::string_view text, GridConfig& config) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ArgumentError("window range must be 'start:stop:step'");
  config.window_start_ms = parse_integer<std::int64_t>(parts[0], "window start");
  config.window_stop_ms = parse_integer<std::int64_t>(parts[1], "window stop");
  config.window_step_ms = parse_integer<std::int64_t>(parts[2], "window step");
}

std::vector<std::size_t> parse_lengths(std::string_view text) {
  std::vector<std::size_t> lengths;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw ArgumentError("length range must be 'first:last'");
    const auto first = parse_integer<std::size_t>(parts[0], "length");
    const auto last = parse_integer<std::size_t>(parts[1], "length");
    if (first > last) throw ArgumentError("length range is empty");
    for (std::size_t l = first; l <= last; ++l) lengths.push_back(l);
  } else {
    for (std::string_view part : split(text, ',')) {
      lengths.push_back(parse_integer<std::size_t>(part, "length"));
    }
  }
  return lengths;
}

std::vector<GridCellResult> run_grid(const TraceRecords& trace, const GridConfig& config,
                                     const VerificationMap& required) {
  const auto windows = window_sizes(config);
  std::vector<GridCellResult> cells;
  cells.reserve(windows.size() * config.sequence_lengths.size());

  for (std::int64_t window : windows) {
    const VerifiedSequence verified =
        extract_verified(trace.events, trace.evidence, WindowConfig{window}, required);
    for (std::size_t length : config.sequence_lengths) {
      GridCellResult cell{window, length, std::nullopt};
      if (verified.entries.size() >= length) {
        const VerifiedSequence prefix = truncate(verified, length);
        CellMetrics metrics;
        for (std::size_t run = 0; run < config.runs_per_cell; ++run) {
          const PipelineResult result = run_pipeline(prefix, config.run);
          metrics.mean_estimation_time_s += result.estimation_time_s;
          metrics.mean_decoding_time_ms += result.decoding_time_ms;
          if (run == 0) {
            metrics.iterations = result.report.iterations;
            metrics.obs_state_ratio = result.obs_state_ratio();
            metrics.f1 = result.f1;
          }
        }
        metrics.mean_estimation_time_s /= static_cast<double>(config.runs_per_cell);
        metrics.mean_decoding_time_ms /= static_cast<double>(config.runs_per_cell);
        cell.metrics = metrics;
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

void write_grid_csv(std::ostream& out, const std::vector<GridCellResult>& cells) {
  out << "window_ms,length,est_time_s,dec_time_ms,iterations,obs_state_ratio,f1\n";
  for (const auto& cell : cells) {
    out << cell.window_ms << ',' << cell.sequence_length;
    if (cell.metrics) {
      const CellMetrics& m = *cell.metrics;
      out << ',' << m.mean_estimation_time_s << ',' << m.mean_decoding_time_ms << ','
          << m.iterations << ',' << m.obs_state_ratio << ',' << m.f1;
    } else {
      out << ",,,,,";
    }
    out << '\n';
  }
}

void write_heatmap_csv(std::ostream& out, const std::vector<GridCellResult>& cells) {
  std::vector<std::size_t> lengths;
  std::vector<std::int64_t> windows;
  for (const auto& cell : cells) {
    if (std::find(lengths.begin(), lengths.end(), cell.sequence_length) == lengths.end()) {
      lengths.push_back(cell.sequence_length);
    }
    if (windows.empty() || windows.back() != cell.window_ms) windows.push_back(cell.window_ms);
  }

  out << "window_ms";
  for (std::size_t l : lengths) out << ',' << l;
  out << '\n';
  auto it = cells.begin();
  for (std::int64_t w : windows) {
    out << w;
    for (std::size_t l : lengths) {
      out << ',';
      auto cell = std::find_if(it, cells.end(), [&](const GridCellResult& c) {
        return c.window_ms == w && c.sequence_length == l;
      });
      if (cell != cells.end() && cell->metrics) out << cell->metrics->f1;
    }
    out << '\n';
  }
}

DetectionReport detect_from_sequences(LabelSequence original,
                                      std::vector<LabelSequence> extracted) {
  ScoreTable table = score_pairs(original, extracted);
  CrucialResult crucial = crucial_pairs(table);
  return DetectionReport{std::move(original), std::move(extracted), std::move(table),
                         std::move(crucial)};
}

DetectionReport detect_crucial_nodes(const VerifiedSequence& sequence, std::size_t attempts,
                                     const RunOptions& options) {
  if (attempts < 1) throw ArgumentError("attempts must be at least 1");
  std::vector<LabelSequence> extracted;
  LabelSequence original;
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    RunOptions run = options;
    run.seed = options.seed + attempt;
    PipelineResult result = run_pipeline(sequence, run);
    if (attempt == 0) original = result.encoded.states.labels();
    extracted.push_back(std::move(result.decoded_labels));
  }
  return detect_from_sequences(std::move(original), std::move(extracted));
}

}  // namespace iotmonitor
