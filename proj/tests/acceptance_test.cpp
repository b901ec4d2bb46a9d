// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "iotmonitor/attack_sim.hpp"
#include "iotmonitor/error.hpp"
#include "iotmonitor/harness.hpp"
#include "iotmonitor/hmm.hpp"
#include "iotmonitor/sequence_analysis.hpp"
#include "iotmonitor/trace.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace iotmonitor;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Random instance family shared by the likelihood and Viterbi oracles:
// N, K in 1..4, T in 1..6; a third of the models have forced zeros.
struct Instance {
  HmmModel model;
  std::vector<std::size_t> obs;
};

Instance random_instance(std::mt19937_64& rng, int index) {
  const std::size_t n = 1 + rng() % 4;
  const std::size_t k = 1 + rng() % 4;
  const std::size_t steps = 1 + rng() % 6;
  const double zeros = index % 3 == 2 ? 0.3 : 0.0;
  Instance inst{oracle::random_model(n, k, rng, zeros), {}};
  inst.obs = oracle::random_observations(steps, k, rng);
  return inst;
}

constexpr int kOracleInstances = 2000;

Verdict likelihood_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  int checked = 0;
  int zero_probability = 0;
  for (int i = 0; i < kOracleInstances; ++i) {
    const Instance inst = random_instance(rng, i);
    const oracle::Enumeration e = oracle::enumerate_paths(inst.model, inst.obs);
    if (e.total == 0.0) {
      // Such sequences must be rejected rather than given a likelihood.
      try {
        forward_backward(inst.model, inst.obs);
        return {false, "zero-probability sequence was not rejected (instance " +
                           std::to_string(i) + ")"};
      } catch (const ModelError&) {
        ++zero_probability;
      }
      continue;
    }
    const double likelihood = std::exp(forward_backward(inst.model, inst.obs).log_likelihood);
    worst = std::max(worst, std::abs(likelihood - e.total) / e.total);
    ++checked;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream d;
  d << checked << " models compared (" << zero_probability
    << " zero-probability rejected), max rel err " << worst << ", " << elapsed << " s";
  return {checked >= 1000 && worst <= 1e-10 && elapsed < 10.0, d.str()};
}

Verdict viterbi_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  int checked = 0;
  int path_mismatch = 0;
  double worst = 0.0;
  for (int i = 0; i < kOracleInstances; ++i) {
    const Instance inst = random_instance(rng, i);
    const oracle::Enumeration e = oracle::enumerate_paths(inst.model, inst.obs);
    const DecodedPath d = viterbi(inst.model, inst.obs);
    if (e.best == 0.0) {
      if (d.feasible || d.states != std::vector<std::size_t>(inst.obs.size(), 0)) ++path_mismatch;
      continue;
    }
    if (d.states != e.best_path) ++path_mismatch;
    worst = std::max(worst, std::abs(d.log_probability - std::log(e.best)));
    ++checked;
  }
  // Exact ties: uniform models make every path equally likely, so the
  // lowest-index rule alone decides the answer (all zeros).
  for (std::size_t n = 1; n <= 4; ++n) {
    for (std::size_t steps = 1; steps <= 6; ++steps) {
      const Matrix q(n, n, 1.0 / static_cast<double>(n));
      const HmmModel m = make_model(StateSpace([n] {
                                      std::vector<std::string> l;
                                      for (std::size_t i = 0; i < n; ++i) l.push_back("s" + std::to_string(i));
                                      return l;
                                    }()),
                                    ObservationAlphabet::enumerated(2),
                                    std::vector<double>(n, 1.0 / static_cast<double>(n)), q,
                                    Matrix(n, 2, 0.5));
      const std::vector<std::size_t> obs(steps, 1);
      const auto e = oracle::enumerate_paths(m, obs);
      if (viterbi(m, obs).states != e.best_path) ++path_mismatch;
      ++checked;
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream d;
  d << checked << " instances, " << path_mismatch << " path mismatches, max |dlogp| " << worst
    << ", " << elapsed << " s";
  return {checked >= 1000 && path_mismatch == 0 && worst <= 1e-10 && elapsed < 10.0, d.str()};
}

Verdict em_monotonicity() {
  std::mt19937_64 rng(2002);
  int runs = 0;
  std::size_t models_checked = 0;
  double worst_drop = 0.0;
  std::string violation;
  for (int i = 0; i < 150; ++i) {
    const std::size_t n = 1 + rng() % 5;
    const std::size_t k = 1 + rng() % 5;
    const std::size_t steps = 2 + rng() % 49;
    const std::vector<std::size_t> obs = oracle::random_observations(steps, k, rng);
    HmmModel model = i % 2 == 0 ? oracle::random_model(n, k, rng)
                                : init_model(StateSpace([n] {
                                               std::vector<std::string> l;
                                               for (std::size_t s = 0; s < n; ++s) l.push_back("x" + std::to_string(s));
                                               return l;
                                             }()),
                                             ObservationAlphabet::enumerated(k), rng());
    TrainOptions options;
    options.max_iterations = 200;
    const TrainResult result =
        train(std::move(model), obs, options, [&](std::size_t, const HmmModel& m) {
          ++models_checked;
          const std::string v = oracle::stochastic_violation(m, 1e-9);
          if (!v.empty() && violation.empty()) violation = v;
        });
    const auto& h = result.report.log_likelihood_history;
    for (std::size_t t = 1; t < h.size(); ++t) worst_drop = std::max(worst_drop, h[t - 1] - h[t]);
    ++runs;
  }
  std::ostringstream d;
  d << runs << " runs, " << models_checked << " intermediate models, largest LL decrease "
    << worst_drop;
  if (!violation.empty()) d << ", stochasticity violated: " << violation;
  return {runs >= 100 && worst_drop <= 1e-9 && violation.empty(), d.str()};
}

Verdict crucial_example() {
  const LabelSequence chain = {"door-opened", "light-on", "camera-on", "fan-on", "window-opened"};
  const std::vector<LabelSequence> extracted = {
      {"door-opened", "light-on", "light-on", "camera-on", "fan-on"},
      {"fan-on", "light-on", "camera-on", "fan-on", "window-opened"},
      {"door-opened", "light-on", "camera-on", "window-opened", "fan-on"}};
  const CrucialResult r = crucial_pairs(score_pairs(chain, extracted));
  std::ostringstream d;
  d << "winner";
  for (const auto& p : r.pairs) d << " (" << p.first << ", " << p.second << ")";
  d << " with score " << r.max_count;
  const bool pass = r.pairs == std::vector<LabelPair>{{"light-on", "camera-on"}};
  return {pass, d.str()};
}

Verdict noise_free_recovery() {
  const ChainSpec spec = default_chain_spec();
  std::int64_t max_delay = 0;
  std::set<std::string> ids;
  std::size_t emissions = 0;
  for (const auto& [label, list] : spec.evidence_map) {
    for (const auto& e : list) {
      max_delay = std::max(max_delay, e.delay_ms);
      ids.insert(e.evidence_id);
      ++emissions;
      if (e.probability != 1.0) return {false, "template evidence is not deterministic"};
    }
  }
  if (spec.device_events.size() != 7 || spec.repetitions != 20 || max_delay > 100 ||
      ids.size() != emissions) {
    return {false, "default template does not match the required chain shape"};
  }
  const SimulatedTrace sim = generate(spec);
  const VerifiedSequence v = extract_verified(sim.records.events, sim.records.evidence, {105});
  RunOptions options;
  options.seed = 42;
  options.restarts = 10;
  const PipelineResult r = run_pipeline(v, options);
  std::ostringstream d;
  d << v.entries.size() << " verified events, " << options.restarts << " restarts, F1 " << r.f1;
  return {r.f1 == 1.0, d.str()};
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

Verdict grid_shape() {
  const fs::path dir = fs::temp_directory_path() / "iotmonitor_acceptance_grid";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path csv = dir / "grid.csv";
  const fs::path heatmap = dir / "grid.heatmap.csv";
  const std::string cmd = std::string("\"") + IOTMONITOR_CLI_PATH + "\" grid --out \"" +
                          csv.string() + "\" > /dev/null";
  if (std::system(cmd.c_str()) != 0) return {false, "grid command failed"};

  const auto rows = read_lines(csv);
  const auto pivot = read_lines(heatmap);
  if (rows.empty() || pivot.empty()) return {false, "missing grid or heatmap output"};
  std::set<std::int64_t> windows;
  std::set<std::size_t> lengths;
  std::size_t filled = 0;
  bool f1_ok = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::vector<std::string> fields;
    std::stringstream ss(rows[i]);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() < 2) return {false, "malformed row: " + rows[i]};
    windows.insert(std::stoll(fields[0]));
    lengths.insert(std::stoul(fields[1]));
    if (fields.size() == 7 && !fields[6].empty()) {
      const double f1 = std::stod(fields[6]);
      f1_ok = f1_ok && f1 >= 0.0 && f1 <= 1.0;
      ++filled;
    }
  }
  const std::size_t data_rows = rows.size() - 1;
  const bool windows_ok = windows.size() == 20 && *windows.begin() == 105 && *windows.rbegin() == 200;
  const bool lengths_ok = lengths.size() == 29 && *lengths.begin() == 2 && *lengths.rbegin() == 30;
  std::ostringstream d;
  d << data_rows << " rows (" << windows.size() << " windows x " << lengths.size()
    << " lengths, " << filled << " with metrics), heatmap " << pivot.size() - 1 << " rows";
  const bool pass = data_rows == 580 && windows_ok && lengths_ok && pivot.size() == 21 && f1_ok;
  return {pass, d.str()};
}

Verdict performance_sanity() {
  ChainSpec spec;
  for (int i = 0; i < 20; ++i) {
    const std::string label = "device-" + std::to_string(i);
    spec.device_events.push_back(label);
    spec.evidence_map[label] = {{"evidence-" + std::to_string(i), 10 + 4 * i, 1.0}};
  }
  spec.repetitions = 20;
  const SimulatedTrace sim = generate(spec);
  const VerifiedSequence v = extract_verified(sim.records.events, sim.records.evidence, {105});
  RunOptions options;
  options.seed = 42;
  const PipelineResult r = run_pipeline(v, options);
  std::ostringstream d;
  d << "N=" << r.encoded.states.size() << " T=" << v.entries.size() << ": "
    << r.report.iterations << " iterations (" << (r.report.converged ? "converged" : "not converged")
    << "), training " << r.estimation_time_s << " s, decoding " << r.decoding_time_ms << " ms";
  const bool pass = r.encoded.states.size() == 20 && r.report.converged &&
                    r.estimation_time_s < 10.0 && r.decoding_time_ms < 50.0;
  return {pass, d.str()};
}

// A five-event cycle where every occurrence carries one of `ratio` distinct
// evidence variants, so the corpus has ratio x 5 unique symbols.
VerifiedSequence engineered_corpus(std::size_t ratio, std::uint64_t seed) {
  constexpr std::size_t kStates = 5;
  constexpr std::size_t kRepetitions = 40;
  std::mt19937_64 rng(seed);
  VerifiedSequence v;
  for (std::size_t rep = 0; rep < kRepetitions; ++rep) {
    for (std::size_t s = 0; s < kStates; ++s) {
      // The first `ratio` repetitions walk through every variant once.
      const std::size_t variant = rep < ratio ? rep : rng() % ratio;
      const std::string label = "event-" + std::to_string(s);
      v.entries.push_back({static_cast<std::int64_t>(v.entries.size()) * 1000, label,
                           {label + "-evidence-" + std::to_string(variant)}});
    }
  }
  return v;
}

Verdict overhead_trend() {
  constexpr int kSeeds = 10;
  std::vector<double> means;
  std::ostringstream d;
  d << "mean iterations by ratio:";
  for (std::size_t ratio = 1; ratio <= 5; ++ratio) {
    double total = 0.0;
    double observed_ratio = 0.0;
    for (int s = 0; s < kSeeds; ++s) {
      RunOptions options;
      options.seed = 100 + static_cast<std::uint64_t>(s);
      const PipelineResult r = run_pipeline(engineered_corpus(ratio, options.seed), options);
      total += static_cast<double>(r.report.iterations);
      observed_ratio = r.obs_state_ratio();
    }
    means.push_back(total / kSeeds);
    d << ' ' << observed_ratio << "->" << means.back();
  }
  return {std::is_sorted(means.begin(), means.end()), d.str()};
}

Verdict window_monotonicity() {
  std::mt19937_64 rng(9009);
  int traces = 0;
  int violations = 0;
  std::vector<std::int64_t> windows;
  for (std::int64_t w = 1; w <= 400; w += 7) windows.push_back(w);
  for (int i = 0; i < 100; ++i) {
    ChainSpec spec;
    const std::size_t events = 2 + rng() % 8;
    for (std::size_t e = 0; e < events; ++e) {
      const std::string label = "ev" + std::to_string(e);
      spec.device_events.push_back(label);
      const std::size_t count = rng() % 3;
      for (std::size_t c = 0; c < count; ++c) {
        spec.evidence_map[label].push_back(
            {"id" + std::to_string(rng() % 6), static_cast<std::int64_t>(rng() % 300),
             std::uniform_real_distribution<double>(0.0, 1.0)(rng)});
      }
    }
    spec.inter_event_gap_ms = 50 + static_cast<std::int64_t>(rng() % 1000);
    spec.repetitions = 1 + rng() % 5;
    spec.spurious_evidence_rate = std::uniform_real_distribution<double>(0.0, 0.003)(rng);
    spec.seed = rng();
    if (spec.evidence_map.empty()) spec.spurious_evidence_rate = std::max(spec.spurious_evidence_rate, 0.001);
    const SimulatedTrace sim = generate(spec);

    std::set<std::int64_t> previous;
    for (std::int64_t w : windows) {
      const VerifiedSequence v = extract_verified(sim.records.events, sim.records.evidence, {w});
      std::set<std::int64_t> current;
      for (const auto& entry : v.entries) current.insert(entry.timestamp_ms);
      if (!std::includes(current.begin(), current.end(), previous.begin(), previous.end())) {
        ++violations;
      }
      previous = std::move(current);
    }
    ++traces;
  }
  std::ostringstream d;
  d << traces << " traces x " << windows.size() << " windows, " << violations << " violations";
  return {traces >= 100 && violations == 0, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"likelihood matches path enumeration", likelihood_oracle},
      {"viterbi matches enumeration argmax", viterbi_oracle},
      {"EM log-likelihood is monotone and models stay stochastic", em_monotonicity},
      {"crucial pair of the worked example", crucial_example},
      {"noise-free chain is recovered end to end", noise_free_recovery},
      {"default grid shape and F1 range", grid_shape},
      {"20-state training and decoding time", performance_sanity},
      {"iterations grow with the observation/state ratio", overhead_trend},
      {"verified events are monotone in window size", window_monotonicity},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first
              << " -- " << v.detail << std::endl;
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failures) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
