// iotmonitor: simulate trigger-action traces, reconstruct hidden event
// sequences and find crucial event transitions.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "iotmonitor/attack_sim.hpp"
#include "iotmonitor/error.hpp"
#include "iotmonitor/harness.hpp"
#include "iotmonitor/model_io.hpp"
#include "iotmonitor/trace.hpp"

namespace fs = std::filesystem;
using namespace iotmonitor;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct PipelineFlags {
  std::string trace;
  std::string verify_map;
  std::int64_t window_ms = 105;
  std::uint64_t seed = 42;
  double tol = 1e-6;
  std::size_t max_iters = 1000;
  std::size_t restarts = 1;

  RunOptions run_options() const {
    RunOptions options;
    options.seed = seed;
    options.train.tolerance = tol;
    options.train.max_iterations = max_iters;
    options.restarts = restarts;
    return options;
  }
};

void add_training_flags(CLI::App* cmd, PipelineFlags& flags) {
  cmd->add_option("--seed", flags.seed, "Model initialization seed")->capture_default_str();
  cmd->add_option("--tol", flags.tol, "Convergence tolerance on parameter change")
      ->capture_default_str();
  cmd->add_option("--max-iters", flags.max_iters, "Baum-Welch iteration cap")
      ->capture_default_str();
  cmd->add_option("--restarts", flags.restarts,
                  "Random initializations; the best-likelihood model is kept")
      ->capture_default_str();
  cmd->add_option("--verify-map", flags.verify_map, "Required-evidence map per event label");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

TraceRecords read_trace(const std::string& path) {
  auto in = open_input(path);
  return parse_trace(in);
}

VerificationMap read_verification_map(const std::string& path) {
  if (path.empty()) return {};
  auto in = open_input(path);
  return parse_verification_map(in);
}

VerifiedSequence verified_from(const PipelineFlags& flags) {
  if (flags.window_ms <= 0) throw ArgumentError("--window-ms must be positive");
  const TraceRecords trace = read_trace(flags.trace);
  return extract_verified(trace.events, trace.evidence, WindowConfig{flags.window_ms},
                          read_verification_map(flags.verify_map));
}

void print_labels(std::ostream& out, const LabelSequence& labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) out << (i ? " " : "") << labels[i];
  out << '\n';
}

// simulate ---------------------------------------------------------------

struct SimulateFlags {
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> repetitions;
  std::optional<std::int64_t> gap_ms;
  std::optional<double> spurious_rate;
  std::vector<std::string> chain;
  std::vector<std::string> evidence;
};

EvidenceEmission parse_emission_flag(const std::string& text, std::string& label) {
  // label:id:delay_ms:probability
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 4) {
    throw ArgumentError("--evidence expects 'label:evidence-id:delay_ms:probability', got '" +
                        text + "'");
  }
  label = parts[0];
  try {
    return EvidenceEmission{parts[1], std::stoll(parts[2]), std::stod(parts[3])};
  } catch (const std::exception&) {
    throw ArgumentError("invalid number in --evidence '" + text + "'");
  }
}

int cmd_simulate(const SimulateFlags& flags) {
  ChainSpec spec = flags.spec.empty() ? default_chain_spec() : load_chain_spec(flags.spec);
  if (flags.seed) spec.seed = *flags.seed;
  if (flags.repetitions) spec.repetitions = *flags.repetitions;
  if (flags.gap_ms) spec.inter_event_gap_ms = *flags.gap_ms;
  if (flags.spurious_rate) spec.spurious_evidence_rate = *flags.spurious_rate;
  if (!flags.chain.empty()) spec.device_events = flags.chain;
  if (!flags.evidence.empty()) {
    spec.evidence_map.clear();
    for (const auto& text : flags.evidence) {
      std::string label;
      EvidenceEmission emission = parse_emission_flag(text, label);
      spec.evidence_map[label].push_back(std::move(emission));
    }
  }

  const SimulatedTrace sim = generate(spec);
  if (flags.out.empty()) {
    write_trace(std::cout, sim.records);
  } else {
    auto out = open_output(flags.out);
    write_trace(out, sim.records);
    if (!out) throw Error("failed writing '" + flags.out + "'");
    std::cerr << "wrote " << sim.records.events.size() << " events and "
              << sim.records.evidence.size() << " evidence records to " << flags.out << '\n';
  }
  return 0;
}

// run ----------------------------------------------------------------------

int cmd_run(const PipelineFlags& flags, const std::string& model_out) {
  const VerifiedSequence verified = verified_from(flags);
  const PipelineResult result = run_pipeline(verified, flags.run_options());

  std::cout << "verified events: " << verified.entries.size() << " (discarded "
            << verified.discarded_count << ")\n"
            << "states: " << result.encoded.states.size()
            << "  symbols: " << result.encoded.alphabet.size()
            << "  obs/state ratio: " << result.obs_state_ratio() << '\n'
            << "iterations: " << result.report.iterations
            << (result.report.converged ? " (converged)" : " (iteration cap reached)");
  if (flags.restarts > 1) std::cout << ", " << result.total_iterations << " over all restarts";
  std::cout << '\n'
            << "log-likelihood: " << std::setprecision(10)
            << result.report.log_likelihood_history.back() << '\n'
            << std::setprecision(6) << "estimation time: " << result.estimation_time_s << " s\n"
            << "decoding time: " << result.decoding_time_ms << " ms\n"
            << "f1: " << result.f1 << '\n'
            << "decoded: ";
  print_labels(std::cout, result.decoded_labels);

  if (!model_out.empty()) save_model(fs::path(model_out), result.model);
  return 0;
}

// grid ---------------------------------------------------------------------

struct GridFlags {
  PipelineFlags pipeline;
  std::string spec;
  std::string window_range;
  std::string lengths;
  std::size_t runs = 10;
  std::string out = "grid.csv";
};

int cmd_grid(const GridFlags& flags) {
  GridConfig config;
  if (!flags.window_range.empty()) parse_window_range(flags.window_range, config);
  if (!flags.lengths.empty()) config.sequence_lengths = parse_lengths(flags.lengths);
  config.runs_per_cell = flags.runs;
  config.run = flags.pipeline.run_options();
  validate(config);

  TraceRecords trace;
  if (!flags.pipeline.trace.empty()) {
    trace = read_trace(flags.pipeline.trace);
  } else {
    trace = generate(flags.spec.empty() ? default_chain_spec() : load_chain_spec(flags.spec))
                .records;
  }

  const auto cells = run_grid(trace, config, read_verification_map(flags.pipeline.verify_map));

  fs::path csv_path(flags.out);
  fs::path heatmap_path = csv_path;
  heatmap_path.replace_extension(".heatmap.csv");
  {
    auto out = open_output(csv_path);
    write_grid_csv(out, cells);
  }
  {
    auto out = open_output(heatmap_path);
    write_heatmap_csv(out, cells);
  }
  std::size_t filled = 0;
  for (const auto& cell : cells) filled += cell.metrics.has_value();
  std::cout << "wrote " << cells.size() << " cells (" << filled << " with metrics) to "
            << csv_path.string() << " and " << heatmap_path.string() << '\n';
  return 0;
}

// detect -------------------------------------------------------------------

int cmd_detect(const PipelineFlags& flags, std::size_t attempts, const std::string& csv_out) {
  if (attempts < 1) throw ArgumentError("--attempts must be at least 1");
  const VerifiedSequence verified = verified_from(flags);
  const DetectionReport report = detect_crucial_nodes(verified, attempts, flags.run_options());

  std::cout << "original chain: ";
  print_labels(std::cout, report.original);
  for (std::size_t i = 0; i < report.extracted.size(); ++i) {
    std::cout << "attempt " << i + 1 << " (seed " << flags.seed + i << "): "
              << report.extracted[i].size() << " decoded events\n";
  }
  write_crucial_report(std::cout, report.table, report.crucial);
  if (!csv_out.empty()) {
    auto out = open_output(csv_out);
    write_crucial_csv(out, report.table, report.crucial);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IoT trigger-action event reconstruction and crucial-node detection"};
  app.require_subcommand(1);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic trace from a chain spec");
  simulate->add_option("--spec", sim.spec, "Chain spec file (default: built-in smart-home chain)");
  simulate->add_option("--out", sim.out, "Output trace path (default: stdout)");
  simulate->add_option("--seed", sim.seed, "Override the spec seed");
  simulate->add_option("--repetitions", sim.repetitions, "Override the repetition count");
  simulate->add_option("--gap-ms", sim.gap_ms, "Override the inter-event gap");
  simulate->add_option("--spurious-rate", sim.spurious_rate,
                       "Override the per-millisecond spurious evidence rate");
  simulate->add_option("--chain", sim.chain, "Replace the device event chain")->delimiter(',');
  simulate->add_option("--evidence", sim.evidence,
                       "Replace the evidence map; repeat 'label:id:delay_ms:probability'");

  PipelineFlags run_flags;
  std::string model_out;
  auto* run = app.add_subcommand("run", "Train and decode one trace");
  run->add_option("--trace", run_flags.trace, "Trace file")->required();
  run->add_option("--window-ms", run_flags.window_ms, "Verification window")->capture_default_str();
  run->add_option("--model-out", model_out, "Write the trained model here");
  add_training_flags(run, run_flags);

  GridFlags grid_flags;
  auto* grid = app.add_subcommand("grid", "Evaluate every (window, length) cell");
  auto* grid_trace = grid->add_option("--trace", grid_flags.pipeline.trace, "Trace file");
  grid->add_option("--spec", grid_flags.spec, "Chain spec to simulate instead of a trace")
      ->excludes(grid_trace);
  grid->add_option("--window-range", grid_flags.window_range, "start:stop:step (default 105:200:5)");
  grid->add_option("--lengths", grid_flags.lengths, "first:last or a,b,c (default 2:30)");
  grid->add_option("--runs", grid_flags.runs, "Timed executions per cell")->capture_default_str();
  grid->add_option("--out", grid_flags.out, "Grid CSV path; the heatmap goes next to it")
      ->capture_default_str();
  add_training_flags(grid, grid_flags.pipeline);

  PipelineFlags detect_flags;
  std::size_t attempts = 5;
  std::string detect_out;
  auto* detect = app.add_subcommand("detect", "Find the crucial event transitions");
  detect->add_option("--trace", detect_flags.trace, "Trace file")->required();
  detect->add_option("--window-ms", detect_flags.window_ms, "Verification window")
      ->capture_default_str();
  detect->add_option("--attempts", attempts, "Decoding attempts (seeds seed..seed+n-1)")
      ->capture_default_str();
  detect->add_option("--out", detect_out, "Write the score table as CSV");
  add_training_flags(detect, detect_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (run->parsed()) return cmd_run(run_flags, model_out);
    if (grid->parsed()) return cmd_grid(grid_flags);
    if (detect->parsed()) return cmd_detect(detect_flags, attempts, detect_out);
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
