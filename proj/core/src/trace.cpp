#include "iotmonitor/trace.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <string_view>

#include "iotmonitor/error.hpp"

namespace iotmonitor {

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(' ', start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool has_whitespace(std::string_view s) {
  return s.find_first_of(" \t\v\f\r\n") != std::string_view::npos;
}

}  // namespace

TraceRecords parse_trace(std::istream& in) {
  TraceRecords records;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty() || line.front() == '#') continue;

    const auto fields = split_spaces(line);
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected '<kind> <timestamp_ms> <identifier>'");
    }
    const std::string_view kind = fields[0];
    if (kind != "E" && kind != "S") {
      throw ParseError(line_no, "unknown record kind '" + std::string(kind) + "'");
    }
    std::int64_t ts = 0;
    const std::string_view ts_text = fields[1];
    auto [ptr, ec] = std::from_chars(ts_text.data(), ts_text.data() + ts_text.size(), ts);
    if (ts_text.empty() || ec != std::errc{} || ptr != ts_text.data() + ts_text.size() || ts < 0) {
      throw ParseError(line_no, "timestamp '" + std::string(ts_text) +
                                    "' is not a non-negative integer");
    }
    const std::string_view id = fields[2];
    if (id.empty() || has_whitespace(id)) throw ParseError(line_no, "empty identifier");

    if (kind == "E") {
      records.events.push_back({ts, std::string(id)});
    } else {
      records.evidence.push_back({ts, std::string(id)});
    }
  }

  auto by_time = [](const auto& a, const auto& b) { return a.timestamp_ms < b.timestamp_ms; };
  std::stable_sort(records.events.begin(), records.events.end(), by_time);
  std::stable_sort(records.evidence.begin(), records.evidence.end(), by_time);
  return records;
}

void write_trace(std::ostream& out, const TraceRecords& records) {
  auto ev = records.events.begin();
  auto ph = records.evidence.begin();
  while (ev != records.events.end() || ph != records.evidence.end()) {
    const bool take_event = ph == records.evidence.end() ||
                            (ev != records.events.end() && ev->timestamp_ms <= ph->timestamp_ms);
    if (take_event) {
      out << "E " << ev->timestamp_ms << ' ' << ev->label << '\n';
      ++ev;
    } else {
      out << "S " << ph->timestamp_ms << ' ' << ph->evidence_id << '\n';
      ++ph;
    }
  }
}

VerificationMap parse_verification_map(std::istream& in) {
  VerificationMap map;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = strip_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos || colon == 0) {
      throw ParseError(line_no, "expected '<event-label>: <evidence-id> ...'");
    }
    const std::string label(line.substr(0, colon));
    if (has_whitespace(label)) throw ParseError(line_no, "event label contains whitespace");

    std::vector<std::string> ids;
    std::string_view rest = line.substr(colon + 1);
    while (!rest.empty()) {
      const std::size_t begin = rest.find_first_not_of(' ');
      if (begin == std::string_view::npos) break;
      rest.remove_prefix(begin);
      const std::size_t end = rest.find(' ');
      ids.emplace_back(rest.substr(0, end));
      rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
    }
    if (ids.empty()) throw ParseError(line_no, "no evidence ids for '" + label + "'");
    auto& slot = map[label];
    slot.insert(slot.end(), ids.begin(), ids.end());
  }
  return map;
}

VerifiedSequence extract_verified(const std::vector<EventRecord>& events,
                                  const std::vector<EvidenceRecord>& evidence,
                                  const WindowConfig& config, const VerificationMap& required) {
  if (config.window_ms <= 0) throw ArgumentError("window_ms must be positive");
  auto by_time = [](const auto& a, const auto& b) { return a.timestamp_ms < b.timestamp_ms; };
  if (!std::is_sorted(events.begin(), events.end(), by_time) ||
      !std::is_sorted(evidence.begin(), evidence.end(), by_time)) {
    throw ArgumentError("events and evidence must be sorted by timestamp");
  }

  VerifiedSequence out;
  for (const EventRecord& event : events) {
    const std::int64_t deadline = event.timestamp_ms + config.window_ms;
    auto first = std::lower_bound(
        evidence.begin(), evidence.end(), event.timestamp_ms,
        [](const EvidenceRecord& r, std::int64_t t) { return r.timestamp_ms < t; });
    auto last = std::upper_bound(
        first, evidence.end(), deadline,
        [](std::int64_t t, const EvidenceRecord& r) { return t < r.timestamp_ms; });

    std::set<std::string> ids;
    for (auto it = first; it != last; ++it) ids.insert(it->evidence_id);

    bool verified = !ids.empty();
    if (verified) {
      if (auto req = required.find(event.label); req != required.end()) {
        verified = std::all_of(req->second.begin(), req->second.end(),
                               [&ids](const std::string& id) { return ids.count(id) > 0; });
      }
    }
    if (verified) {
      out.entries.push_back({event.timestamp_ms, event.label, Symbol(ids.begin(), ids.end())});
    } else {
      ++out.discarded_count;
    }
  }
  return out;
}

VerifiedSequence truncate(const VerifiedSequence& sequence, std::size_t length) {
  VerifiedSequence out;
  const std::size_t keep = std::min(length, sequence.entries.size());
  out.entries.assign(sequence.entries.begin(), sequence.entries.begin() + keep);
  out.discarded_count = sequence.discarded_count;
  return out;
}

EncodedSequence build_alphabet(const VerifiedSequence& sequence) {
  if (sequence.entries.empty()) throw EmptyInputError("verified sequence is empty");

  std::vector<Symbol> symbols;
  std::map<Symbol, std::size_t> symbol_index;
  std::vector<std::string> labels;
  std::map<std::string, std::size_t> label_index;
  std::vector<std::size_t> observations;
  std::vector<std::size_t> truth;

  for (const VerifiedEntry& entry : sequence.entries) {
    Symbol symbol = canonical_symbol(entry.symbol);
    auto [sit, new_symbol] = symbol_index.try_emplace(symbol, symbols.size());
    if (new_symbol) symbols.push_back(std::move(symbol));
    observations.push_back(sit->second);

    auto [lit, new_label] = label_index.try_emplace(entry.label, labels.size());
    if (new_label) labels.push_back(entry.label);
    truth.push_back(lit->second);
  }

  return EncodedSequence{ObservationAlphabet(std::move(symbols)), std::move(observations),
                         StateSpace(std::move(labels)), std::move(truth)};
}

}  // namespace iotmonitor
