#include "iotmonitor/attack_sim.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string_view>

#include "iotmonitor/error.hpp"

namespace iotmonitor {

namespace {

bool valid_identifier(std::string_view s) {
  return !s.empty() && s.find_first_of(" \t\v\f\r\n") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, const std::string& what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(line, "invalid " + what + " '" + std::string(text) + "'");
  }
  return value;
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return {buf.data(), end};
}

}  // namespace

void validate(const ChainSpec& spec) {
  if (spec.device_events.empty()) throw SpecError("chain must contain at least one device event");
  for (const auto& label : spec.device_events) {
    if (!valid_identifier(label)) throw SpecError("invalid device event label '" + label + "'");
  }
  if (spec.inter_event_gap_ms <= 0) throw SpecError("inter_event_gap_ms must be positive");
  if (!(spec.spurious_evidence_rate >= 0.0 && spec.spurious_evidence_rate < 1.0)) {
    throw SpecError("spurious_evidence_rate must lie in [0, 1)");
  }
  for (const auto& [label, emissions] : spec.evidence_map) {
    for (const auto& e : emissions) {
      if (!valid_identifier(e.evidence_id)) {
        throw SpecError("invalid evidence id '" + e.evidence_id + "' for '" + label + "'");
      }
      if (e.delay_ms < 0) throw SpecError("negative evidence delay for '" + label + "'");
      if (!(e.probability >= 0.0 && e.probability <= 1.0)) {
        throw SpecError("emit probability for '" + label + "' must lie in [0, 1]");
      }
    }
  }
}

SimulatedTrace generate(const ChainSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution coin;

  SimulatedTrace out;
  std::vector<EvidenceRecord>& evidence = out.records.evidence;
  std::int64_t t = 0;
  std::int64_t span_end = 0;
  for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
    for (const auto& label : spec.device_events) {
      out.records.events.push_back({t, label});
      out.truth.push_back(label);
      span_end = std::max(span_end, t);
      if (auto it = spec.evidence_map.find(label); it != spec.evidence_map.end()) {
        for (const auto& emission : it->second) {
          if (coin(rng, std::bernoulli_distribution::param_type(emission.probability))) {
            evidence.push_back({t + emission.delay_ms, emission.evidence_id});
            span_end = std::max(span_end, t + emission.delay_ms);
          }
        }
      }
      t += spec.inter_event_gap_ms;
    }
  }

  if (spec.spurious_evidence_rate > 0.0 && !out.records.events.empty()) {
    std::set<std::string> universe;
    for (const auto& [label, emissions] : spec.evidence_map) {
      for (const auto& e : emissions) universe.insert(e.evidence_id);
    }
    // Geometric gaps are equivalent to an independent draw per millisecond.
    std::geometric_distribution<std::int64_t> gap(spec.spurious_evidence_rate);
    for (const auto& id : universe) {
      for (std::int64_t ms = gap(rng); ms <= span_end; ms += 1 + gap(rng)) {
        evidence.push_back({ms, id});
      }
    }
  }

  std::stable_sort(evidence.begin(), evidence.end(),
                   [](const auto& a, const auto& b) { return a.timestamp_ms < b.timestamp_ms; });
  return out;
}

ChainSpec default_chain_spec() {
  ChainSpec spec;
  spec.device_events = {"door-unlocked", "motion-detected", "home-mode-on", "light-on",
                        "coffee-grinding", "window-opened", "door-vibration"};
  spec.evidence_map = {
      {"door-unlocked", {{"lock-motor-sound", 20, 1.0}}},
      {"motion-detected", {{"pir-infrared", 10, 1.0}}},
      {"home-mode-on", {{"hub-chime", 30, 1.0}}},
      {"light-on", {{"luminance-rise", 15, 1.0}}},
      {"coffee-grinding", {{"grinder-vibration", 40, 1.0}, {"grinder-sound", 60, 1.0}}},
      {"window-opened", {{"window-accelerometer", 50, 1.0}, {"airflow", 90, 1.0}}},
      {"door-vibration", {{"door-accelerometer", 25, 1.0}}},
  };
  spec.inter_event_gap_ms = 1000;
  spec.repetitions = 20;
  spec.spurious_evidence_rate = 0.0;
  spec.seed = 42;
  return spec;
}

ChainSpec parse_chain_spec(std::istream& in) {
  ChainSpec spec;
  enum class Section { kSettings, kChain, kEvidence } section = Section::kSettings;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line == "[chain]") {
        section = Section::kChain;
      } else if (line == "[evidence]") {
        section = Section::kEvidence;
      } else {
        throw ParseError(line_no, "unknown section '" + std::string(line) + "'");
      }
      continue;
    }

    switch (section) {
      case Section::kSettings: {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key == "seed") {
          spec.seed = parse_number<std::uint64_t>(value, line_no, "seed");
        } else if (key == "inter_event_gap_ms") {
          spec.inter_event_gap_ms = parse_number<std::int64_t>(value, line_no, "gap");
        } else if (key == "repetitions") {
          spec.repetitions = parse_number<std::size_t>(value, line_no, "repetition count");
        } else if (key == "spurious_evidence_rate") {
          spec.spurious_evidence_rate = parse_number<double>(value, line_no, "rate");
        } else {
          throw ParseError(line_no, "unknown setting '" + std::string(key) + "'");
        }
        break;
      }
      case Section::kChain:
        if (!valid_identifier(line)) throw ParseError(line_no, "event label contains whitespace");
        spec.device_events.emplace_back(line);
        break;
      case Section::kEvidence: {
        std::istringstream fields{std::string(line)};
        std::string label, id, delay, probability, extra;
        if (!(fields >> label >> id >> delay >> probability) || (fields >> extra)) {
          throw ParseError(line_no,
                           "expected '<event-label> <evidence-id> <delay_ms> <probability>'");
        }
        spec.evidence_map[label].push_back(
            {id, parse_number<std::int64_t>(delay, line_no, "delay"),
             parse_number<double>(probability, line_no, "probability")});
        break;
      }
    }
  }
  return spec;
}

ChainSpec load_chain_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return parse_chain_spec(in);
}

void write_chain_spec(std::ostream& out, const ChainSpec& spec) {
  out << "seed = " << spec.seed << '\n'
      << "inter_event_gap_ms = " << spec.inter_event_gap_ms << '\n'
      << "repetitions = " << spec.repetitions << '\n'
      << "spurious_evidence_rate = " << format_real(spec.spurious_evidence_rate) << '\n'
      << "\n[chain]\n";
  for (const auto& label : spec.device_events) out << label << '\n';
  out << "\n[evidence]\n";
  for (const auto& [label, emissions] : spec.evidence_map) {
    for (const auto& e : emissions) {
      out << label << ' ' << e.evidence_id << ' ' << e.delay_ms << ' '
          << format_real(e.probability) << '\n';
    }
  }
}

}  // namespace iotmonitor
