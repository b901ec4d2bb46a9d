#ifndef IOTMONITOR_TRACE_HPP
#define IOTMONITOR_TRACE_HPP

// Event/evidence trace files and sliding-window event verification.
//
// Trace format, one record per line, fields separated by single spaces:
//
//   E <timestamp_ms> <event-label>
//   S <timestamp_ms> <evidence-id>
//   # comment
//
// Verification maps list the evidence an event needs to count as verified:
//
//   <event-label>: <evidence-id> [<evidence-id> ...]

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "iotmonitor/hmm.hpp"

namespace iotmonitor {

struct EventRecord {
  std::int64_t timestamp_ms = 0;
  std::string label;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct EvidenceRecord {
  std::int64_t timestamp_ms = 0;
  std::string evidence_id;

  friend bool operator==(const EvidenceRecord&, const EvidenceRecord&) = default;
};

struct TraceRecords {
  std::vector<EventRecord> events;
  std::vector<EvidenceRecord> evidence;

  friend bool operator==(const TraceRecords&, const TraceRecords&) = default;
};

/// Parses a trace. Both lists come back stably sorted by timestamp.
/// Throws ParseError naming the offending line.
TraceRecords parse_trace(std::istream& in);

/// Writes records merged by timestamp; at equal timestamps events precede
/// evidence and each kind keeps its input order.
void write_trace(std::ostream& out, const TraceRecords& records);

struct WindowConfig {
  std::int64_t window_ms = 105;
};

/// Event label -> evidence ids that must all fall inside the window.
using VerificationMap = std::map<std::string, std::vector<std::string>>;

VerificationMap parse_verification_map(std::istream& in);

struct VerifiedEntry {
  std::int64_t timestamp_ms = 0;
  std::string label;
  Symbol symbol;

  friend bool operator==(const VerifiedEntry&, const VerifiedEntry&) = default;
};

struct VerifiedSequence {
  std::vector<VerifiedEntry> entries;
  std::size_t discarded_count = 0;

  friend bool operator==(const VerifiedSequence&, const VerifiedSequence&) = default;
};

/// Keeps each event whose closed window [t, t + window_ms] contains evidence.
/// The kept event's observation symbol is the canonical set of evidence ids
/// inside that window. Labels present in `required` additionally need every
/// listed id inside the window. Evidence may verify any number of events.
///
/// Both inputs must be sorted by timestamp (ArgumentError otherwise).
VerifiedSequence extract_verified(const std::vector<EventRecord>& events,
                                  const std::vector<EvidenceRecord>& evidence,
                                  const WindowConfig& config,
                                  const VerificationMap& required = {});

/// The first `length` entries of `sequence` (or all of them).
VerifiedSequence truncate(const VerifiedSequence& sequence, std::size_t length);

/// A verified sequence re-expressed as HMM inputs. Alphabet symbols and
/// states are numbered in order of first appearance.
struct EncodedSequence {
  ObservationAlphabet alphabet;
  std::vector<std::size_t> observations;
  StateSpace states;
  std::vector<std::size_t> truth;
};

/// Throws EmptyInputError for an empty sequence.
EncodedSequence build_alphabet(const VerifiedSequence& sequence);

}  // namespace iotmonitor

#endif  // IOTMONITOR_TRACE_HPP
