#include "iotmonitor/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include "iotmonitor/error.hpp"

namespace iotmonitor {

namespace {

void normalize(std::span<double> values) {
  const double total = std::accumulate(values.begin(), values.end(), 0.0);
  for (double& v : values) v /= total;
}

void check_distribution(std::span<const double> values, double tolerance,
                        const char* what) {
  double total = 0.0;
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ModelError(std::string(what) + " has an entry outside [0, 1]");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > tolerance) {
    throw ModelError(std::string(what) + " does not sum to 1");
  }
}

// |z| + eps over standard normal draws, normalized.
void fill_gaussian_row(std::span<double> row, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : row) v = std::abs(normal(rng)) + 1e-6;
  normalize(row);
}

void fill_dirichlet_row(std::span<double> row, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  for (double& v : row) v = gamma(rng);
  normalize(row);
}

std::vector<std::string> evidence_union(const std::vector<Symbol>& symbols) {
  std::set<std::string> universe;
  for (const Symbol& s : symbols) universe.insert(s.begin(), s.end());
  return {universe.begin(), universe.end()};
}

double safe_log(double p) {
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

}  // namespace

Symbol canonical_symbol(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw DimensionError("state space must contain at least one state");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw ArgumentError("state labels must be non-empty");
    if (!index_.emplace(labels_[i], i).second) {
      throw ArgumentError("duplicate state label '" + labels_[i] + "'");
    }
  }
}

std::optional<std::size_t> StateSpace::index_of(std::string_view label) const {
  if (auto it = index_.find(label); it != index_.end()) return it->second;
  return std::nullopt;
}

ObservationAlphabet::ObservationAlphabet(std::vector<Symbol> symbols)
    : ObservationAlphabet(symbols, evidence_union(symbols)) {}

ObservationAlphabet::ObservationAlphabet(std::vector<Symbol> symbols,
                                         std::vector<std::string> evidence_universe)
    : symbols_(std::move(symbols)), universe_(canonical_symbol(std::move(evidence_universe))) {
  if (symbols_.empty()) throw DimensionError("alphabet must contain at least one symbol");
  for (std::size_t k = 0; k < symbols_.size(); ++k) {
    Symbol& s = symbols_[k];
    s = canonical_symbol(std::move(s));
    for (const std::string& id : s) {
      if (!std::binary_search(universe_.begin(), universe_.end(), id)) {
        throw AlphabetError("evidence id '" + id + "' is not in the evidence universe");
      }
    }
    if (!index_.emplace(s, k).second) throw AlphabetError("duplicate observation symbol");
  }
}

ObservationAlphabet ObservationAlphabet::enumerated(std::size_t k) {
  std::vector<Symbol> symbols;
  symbols.reserve(k);
  for (std::size_t i = 0; i < k; ++i) symbols.push_back({"y" + std::to_string(i)});
  return ObservationAlphabet(std::move(symbols));
}

std::optional<std::size_t> ObservationAlphabet::index_of(const Symbol& symbol) const {
  if (auto it = index_.find(symbol); it != index_.end()) return it->second;
  return std::nullopt;
}

void validate(const HmmModel& model, double tolerance) {
  const std::size_t n = model.state_count();
  const std::size_t k = model.symbol_count();
  if (model.initial.size() != n) throw DimensionError("initial distribution must have N entries");
  if (model.transitions.rows() != n || model.transitions.cols() != n) {
    throw DimensionError("transition matrix must be N x N");
  }
  if (model.emissions.rows() != n || model.emissions.cols() != k) {
    throw DimensionError("emission matrix must be N x K");
  }
  check_distribution(model.initial, tolerance, "initial distribution");
  for (std::size_t i = 0; i < n; ++i) {
    check_distribution(model.transitions.row(i), tolerance, "transition row");
    check_distribution(model.emissions.row(i), tolerance, "emission row");
  }
}

HmmModel make_model(StateSpace states, ObservationAlphabet alphabet,
                    std::vector<double> initial, Matrix transitions, Matrix emissions) {
  HmmModel model{std::move(states), std::move(alphabet), std::move(initial),
                 std::move(transitions), std::move(emissions)};
  validate(model);
  return model;
}

void check_observations(const HmmModel& model, std::span<const std::size_t> observations) {
  if (observations.empty()) throw EmptyInputError("observation sequence is empty");
  const std::size_t k = model.symbol_count();
  for (std::size_t t = 0; t < observations.size(); ++t) {
    if (observations[t] >= k) {
      throw AlphabetError("observation " + std::to_string(observations[t]) + " at position " +
                          std::to_string(t) + " is outside an alphabet of size " +
                          std::to_string(k));
    }
  }
}

HmmModel init_model(StateSpace states, ObservationAlphabet alphabet, std::uint64_t seed) {
  const std::size_t n = states.size();
  const std::size_t k = alphabet.size();
  std::mt19937_64 rng(seed);

  std::vector<double> initial(n);
  fill_gaussian_row(initial, rng);
  Matrix transitions(n, n);
  for (std::size_t i = 0; i < n; ++i) fill_gaussian_row(transitions.row(i), rng);
  Matrix emissions(n, k);
  for (std::size_t i = 0; i < n; ++i) fill_dirichlet_row(emissions.row(i), rng);

  return HmmModel{std::move(states), std::move(alphabet), std::move(initial),
                  std::move(transitions), std::move(emissions)};
}

ForwardBackwardTables forward_backward(const HmmModel& model,
                                       std::span<const std::size_t> observations) {
  check_observations(model, observations);
  const std::size_t n = model.state_count();
  const std::size_t steps = observations.size();
  const Matrix& q = model.transitions;
  const Matrix& e = model.emissions;

  ForwardBackwardTables fb{Matrix(steps, n), Matrix(steps, n, 1.0),
                           std::vector<double>(steps), 0.0};

  for (std::size_t t = 0; t < steps; ++t) {
    auto row = fb.alpha.row(t);
    const std::size_t y = observations[t];
    if (t == 0) {
      for (std::size_t i = 0; i < n; ++i) row[i] = model.initial[i] * e(i, y);
    } else {
      auto prev = fb.alpha.row(t - 1);
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += prev[i] * q(i, j);
        row[j] = acc * e(j, y);
      }
    }
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    if (!(total > 0.0)) {
      throw ModelError("observation sequence has zero probability under the model (t=" +
                       std::to_string(t) + ")");
    }
    fb.scale[t] = 1.0 / total;
    for (double& v : row) v *= fb.scale[t];
    fb.log_likelihood += std::log(total);
  }

  for (std::size_t t = steps - 1; t-- > 0;) {
    const std::size_t y = observations[t + 1];
    auto next = fb.beta.row(t + 1);
    auto row = fb.beta.row(t);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += q(i, j) * e(j, y) * next[j];
      row[i] = acc * fb.scale[t + 1];
    }
  }
  return fb;
}

PosteriorTables posteriors(const HmmModel& model, std::span<const std::size_t> observations,
                           const ForwardBackwardTables& tables) {
  const std::size_t n = model.state_count();
  const std::size_t steps = observations.size();
  if (tables.alpha.rows() != steps || tables.beta.rows() != steps ||
      tables.scale.size() != steps || tables.alpha.cols() != n || tables.beta.cols() != n) {
    throw DimensionError("forward-backward tables do not match the model and sequence");
  }
  check_observations(model, observations);

  PosteriorTables post{Matrix(steps, n), std::vector<double>((steps - 1) * n * n), n};

  for (std::size_t t = 0; t < steps; ++t) {
    auto row = post.gamma.row(t);
    for (std::size_t i = 0; i < n; ++i) row[i] = tables.alpha(t, i) * tables.beta(t, i);
    normalize(row);
  }

  const Matrix& q = model.transitions;
  const Matrix& e = model.emissions;
  for (std::size_t t = 0; t + 1 < steps; ++t) {
    const std::size_t y = observations[t + 1];
    std::span<double> slice(post.xi.data() + t * n * n, n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        slice[i * n + j] = tables.alpha(t, i) * q(i, j) * e(j, y) * tables.beta(t + 1, j) *
                           tables.scale[t + 1];
      }
    }
    normalize(slice);
  }
  return post;
}

StepResult baum_welch_step(const HmmModel& model, std::span<const std::size_t> observations) {
  const ForwardBackwardTables fb = forward_backward(model, observations);
  const PosteriorTables post = posteriors(model, observations, fb);
  const std::size_t n = model.state_count();
  const std::size_t k = model.symbol_count();
  const std::size_t steps = observations.size();

  HmmModel next = model;
  auto first = post.gamma.row(0);
  next.initial.assign(first.begin(), first.end());

  if (steps >= 2) {
    for (std::size_t i = 0; i < n; ++i) {
      double occupancy = 0.0;
      for (std::size_t t = 0; t + 1 < steps; ++t) occupancy += post.gamma(t, i);
      if (!(occupancy > 0.0)) continue;
      auto row = next.transitions.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        double expected = 0.0;
        for (std::size_t t = 0; t + 1 < steps; ++t) expected += post.pair(t, i, j);
        row[j] = expected / occupancy;
      }
      normalize(row);
    }
  }

  for (std::size_t j = 0; j < n; ++j) {
    double occupancy = 0.0;
    std::vector<double> expected(k, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
      occupancy += post.gamma(t, j);
      expected[observations[t]] += post.gamma(t, j);
    }
    auto row = next.emissions.row(j);
    if (occupancy > 0.0) {
      for (std::size_t s = 0; s < k; ++s) row[s] = expected[s] / occupancy;
    }
    for (double& v : row) v = std::max(v, kEmissionFloor);
    normalize(row);
  }

  return StepResult{std::move(next), fb.log_likelihood};
}

double max_abs_difference(const HmmModel& a, const HmmModel& b) {
  if (a.state_count() != b.state_count() || a.symbol_count() != b.symbol_count()) {
    throw DimensionError("models have different dimensions");
  }
  double delta = 0.0;
  auto scan = [&delta](std::span<const double> x, std::span<const double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) delta = std::max(delta, std::abs(x[i] - y[i]));
  };
  scan(a.initial, b.initial);
  scan(a.transitions.values(), b.transitions.values());
  scan(a.emissions.values(), b.emissions.values());
  return delta;
}

TrainResult train(HmmModel model, std::span<const std::size_t> observations,
                  const TrainOptions& options, const TrainObserver& observer) {
  if (options.max_iterations < 1) throw ArgumentError("max_iterations must be at least 1");
  if (!(options.tolerance > 0.0)) throw ArgumentError("tolerance must be positive");
  validate(model);

  TrainReport report;
  while (report.iterations < options.max_iterations) {
    StepResult step = baum_welch_step(model, observations);
    ++report.iterations;
    report.log_likelihood_history.push_back(step.log_likelihood);
    report.final_delta = max_abs_difference(model, step.model);
    model = std::move(step.model);
    if (observer) observer(report.iterations, model);
    if (report.final_delta < options.tolerance) {
      report.converged = true;
      break;
    }
  }
  report.log_likelihood_history.push_back(forward_backward(model, observations).log_likelihood);
  return TrainResult{std::move(model), std::move(report)};
}

namespace {

// Log scores within this relative distance are treated as equal so that
// rounding cannot override the lowest-index rule on exact ties.
constexpr double kViterbiTieTolerance = 1e-12;

bool beats(double candidate, double best) {
  if (!std::isfinite(best)) return candidate > best;
  return candidate > best + kViterbiTieTolerance * std::max(1.0, std::abs(best));
}

}  // namespace

DecodedPath viterbi(const HmmModel& model, std::span<const std::size_t> observations) {
  check_observations(model, observations);
  const std::size_t n = model.state_count();
  const std::size_t steps = observations.size();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  Matrix log_q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) log_q(i, j) = safe_log(model.transitions(i, j));
  }

  std::vector<double> score(n);
  std::vector<double> next(n);
  // back[t][j]: best predecessor of state j at time t; row 0 stays zero.
  std::vector<std::size_t> back(steps * n, 0);

  for (std::size_t i = 0; i < n; ++i) {
    score[i] = safe_log(model.initial[i]) + safe_log(model.emissions(i, observations[0]));
  }
  for (std::size_t t = 1; t < steps; ++t) {
    const std::size_t y = observations[t];
    for (std::size_t j = 0; j < n; ++j) {
      double best = kNegInf;
      std::size_t arg = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double candidate = score[i] + log_q(i, j);
        if (beats(candidate, best)) {
          best = candidate;
          arg = i;
        }
      }
      next[j] = best + safe_log(model.emissions(j, y));
      back[t * n + j] = arg;
    }
    std::swap(score, next);
  }

  DecodedPath path;
  path.states.assign(steps, 0);
  double best = kNegInf;
  std::size_t last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (beats(score[i], best)) {
      best = score[i];
      last = i;
    }
  }
  path.log_probability = best;
  path.feasible = std::isfinite(best);
  if (!path.feasible) return path;

  path.states[steps - 1] = last;
  for (std::size_t t = steps - 1; t > 0; --t) {
    path.states[t - 1] = back[t * n + path.states[t]];
  }
  return path;
}

}  // namespace iotmonitor
