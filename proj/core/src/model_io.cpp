#include "iotmonitor/model_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "iotmonitor/error.hpp"

namespace iotmonitor {

namespace {

constexpr const char* kMagic = "iotmonitor-hmm";
constexpr int kVersion = 1;

std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  if (ec != std::errc{}) throw Error("cannot format value");
  return {buf.data(), end};
}

void check_token(const std::string& token, const char* what) {
  if (token.empty() ||
      std::any_of(token.begin(), token.end(),
                  [](unsigned char c) { return std::isspace(c) != 0; })) {
    throw ArgumentError(std::string(what) + " '" + token +
                        "' cannot be serialized: it is empty or contains whitespace");
  }
}

void write_row(std::ostream& out, std::span<const double> row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ' ';
    out << format_real(row[i]);
  }
  out << '\n';
}

// Whitespace-separated token reader tracking line numbers for diagnostics.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string next(const char* what) {
    std::string token;
    int c;
    while ((c = in_.get()) != EOF) {
      if (c == '\n') {
        if (!token.empty()) {
          in_.unget();
          break;
        }
        ++line_;
      } else if (std::isspace(c)) {
        if (!token.empty()) break;
      } else {
        token.push_back(static_cast<char>(c));
      }
    }
    if (token.empty()) throw ParseError(line_, std::string("unexpected end of input, expected ") + what);
    return token;
  }

  void expect(const char* keyword) {
    const std::string token = next(keyword);
    if (token != keyword) {
      throw ParseError(line_, "expected '" + std::string(keyword) + "', found '" + token + "'");
    }
  }

  std::size_t count(const char* what) {
    const std::string token = next(what);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw ParseError(line_, std::string("invalid ") + what + " '" + token + "'");
    }
    return value;
  }

  double real(const char* what) {
    const std::string token = next(what);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw ParseError(line_, std::string("invalid ") + what + " '" + token + "'");
    }
    return value;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

}  // namespace

void save_model(std::ostream& out, const HmmModel& model) {
  validate(model);
  out << kMagic << ' ' << kVersion << '\n';
  out << "states " << model.state_count() << '\n';
  for (const auto& label : model.states.labels()) {
    check_token(label, "state label");
    out << label << '\n';
  }
  const auto& universe = model.alphabet.evidence_universe();
  out << "evidence " << universe.size();
  for (const auto& id : universe) {
    check_token(id, "evidence id");
    out << ' ' << id;
  }
  out << '\n';
  out << "symbols " << model.symbol_count() << '\n';
  for (const Symbol& symbol : model.alphabet.symbols()) {
    out << symbol.size();
    for (const auto& id : symbol) out << ' ' << id;
    out << '\n';
  }
  out << "initial\n";
  write_row(out, model.initial);
  out << "transitions\n";
  for (std::size_t i = 0; i < model.state_count(); ++i) write_row(out, model.transitions.row(i));
  out << "emissions\n";
  for (std::size_t i = 0; i < model.state_count(); ++i) write_row(out, model.emissions.row(i));
}

void save_model(const std::filesystem::path& path, const HmmModel& model) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  save_model(out, model);
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

HmmModel load_model(std::istream& in) {
  Reader reader(in);
  reader.expect(kMagic);
  if (reader.count("format version") != static_cast<std::size_t>(kVersion)) {
    throw ParseError(reader.line(), "unsupported model format version");
  }

  reader.expect("states");
  const std::size_t n = reader.count("state count");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(reader.next("state label"));

  reader.expect("evidence");
  const std::size_t m = reader.count("evidence count");
  std::vector<std::string> universe;
  for (std::size_t i = 0; i < m; ++i) universe.push_back(reader.next("evidence id"));

  reader.expect("symbols");
  const std::size_t k = reader.count("symbol count");
  std::vector<Symbol> symbols(k);
  for (auto& symbol : symbols) {
    const std::size_t size = reader.count("symbol size");
    for (std::size_t i = 0; i < size; ++i) symbol.push_back(reader.next("evidence id"));
  }

  reader.expect("initial");
  std::vector<double> initial(n);
  for (double& v : initial) v = reader.real("probability");
  reader.expect("transitions");
  Matrix transitions(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) transitions(i, j) = reader.real("probability");
  }
  reader.expect("emissions");
  Matrix emissions(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) emissions(i, j) = reader.real("probability");
  }

  return make_model(StateSpace(std::move(labels)),
                    ObservationAlphabet(std::move(symbols), std::move(universe)),
                    std::move(initial), std::move(transitions), std::move(emissions));
}

HmmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return load_model(in);
}

}  // namespace iotmonitor
