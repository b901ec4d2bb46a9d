#ifndef IOTMONITOR_ATTACK_SIM_HPP
#define IOTMONITOR_ATTACK_SIM_HPP

// Synthetic trigger-action traces with ground truth.
//
// A chain of device events repeats `repetitions` times, one event every
// `inter_event_gap_ms`, starting at t = 0. Each event emits its mapped
// evidence after the configured delay with the configured probability.
// Spurious evidence is a Bernoulli(spurious_evidence_rate) draw for every
// (evidence id, millisecond) pair over the trace span. Injected attack
// events are ordinary entries of `device_events`.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "iotmonitor/trace.hpp"

namespace iotmonitor {

struct EvidenceEmission {
  std::string evidence_id;
  std::int64_t delay_ms = 0;
  double probability = 1.0;

  friend bool operator==(const EvidenceEmission&, const EvidenceEmission&) = default;
};

struct ChainSpec {
  std::vector<std::string> device_events;
  std::map<std::string, std::vector<EvidenceEmission>> evidence_map;
  std::int64_t inter_event_gap_ms = 1000;
  std::size_t repetitions = 1;
  double spurious_evidence_rate = 0.0;
  std::uint64_t seed = 42;

  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

/// Throws SpecError when the chain is empty or a field is out of range.
void validate(const ChainSpec& spec);

struct SimulatedTrace {
  TraceRecords records;
  std::vector<std::string> truth;  // every emitted event label, in order
};

SimulatedTrace generate(const ChainSpec& spec);

/// The smart-home scenario: unlocking the front door starts a chain through
/// motion detection, home mode, the light, coffee grinding and the window,
/// ending with the bedroom door vibrating. Every event has distinct evidence
/// with delays of at most 100 ms; 20 repetitions, no noise.
ChainSpec default_chain_spec();

/// Reads the chain spec format documented in docs/chain_spec.md.
ChainSpec parse_chain_spec(std::istream& in);
ChainSpec load_chain_spec(const std::filesystem::path& path);
void write_chain_spec(std::ostream& out, const ChainSpec& spec);

}  // namespace iotmonitor

#endif  // IOTMONITOR_ATTACK_SIM_HPP
