#ifndef IOTMONITOR_HMM_HPP
#define IOTMONITOR_HMM_HPP

// Discrete-observation hidden Markov model: representation, Baum-Welch
// training and Viterbi decoding.
//
// Hidden states are device events; observation symbols are canonical sets of
// physical-evidence identifiers. All operations are pure functions of their
// arguments and may be called concurrently on distinct or shared const data.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iotmonitor/matrix.hpp"

namespace iotmonitor {

/// A sorted, duplicate-free set of evidence identifiers.
using Symbol = std::vector<std::string>;

/// Sorts and deduplicates `ids` into canonical symbol form.
Symbol canonical_symbol(std::vector<std::string> ids);

/// Ordered, unique event labels naming the hidden states.
class StateSpace {
 public:
  /// Throws DimensionError when empty, ArgumentError on duplicate labels.
  explicit StateSpace(std::vector<std::string> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<std::size_t> index_of(std::string_view label) const;

  friend bool operator==(const StateSpace& a, const StateSpace& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Ordered, unique observation symbols over an evidence universe of size M.
class ObservationAlphabet {
 public:
  /// The evidence universe is the union of the identifiers in `symbols`.
  explicit ObservationAlphabet(std::vector<Symbol> symbols);

  /// Throws AlphabetError if a symbol mentions an identifier outside
  /// `evidence_universe`.
  ObservationAlphabet(std::vector<Symbol> symbols,
                      std::vector<std::string> evidence_universe);

  /// K single-identifier symbols {"y0"}, {"y1"}, ... for synthetic models.
  static ObservationAlphabet enumerated(std::size_t k);

  std::size_t size() const noexcept { return symbols_.size(); }
  const Symbol& symbol(std::size_t index) const { return symbols_.at(index); }
  const std::vector<Symbol>& symbols() const noexcept { return symbols_; }
  std::optional<std::size_t> index_of(const Symbol& symbol) const;

  /// Sorted evidence universe; its size is M.
  const std::vector<std::string>& evidence_universe() const noexcept {
    return universe_;
  }

  friend bool operator==(const ObservationAlphabet& a,
                         const ObservationAlphabet& b) {
    return a.symbols_ == b.symbols_ && a.universe_ == b.universe_;
  }

 private:
  std::vector<Symbol> symbols_;
  std::vector<std::string> universe_;
  std::map<Symbol, std::size_t> index_;
};

/// theta = (initial distribution, transition matrix, emission matrix).
struct HmmModel {
  StateSpace states;
  ObservationAlphabet alphabet;
  std::vector<double> initial;  // length N
  Matrix transitions;           // N x N, row i = Pr(next | current = i)
  Matrix emissions;             // N x K, row j = Pr(symbol | state = j)

  std::size_t state_count() const noexcept { return states.size(); }
  std::size_t symbol_count() const noexcept { return alphabet.size(); }

  friend bool operator==(const HmmModel&, const HmmModel&) = default;
};

/// Tolerance used for every "sums to one" check.
inline constexpr double kStochasticTolerance = 1e-9;

/// Throws DimensionError on shape mismatch and ModelError when a
/// distribution is not stochastic within `tolerance`.
void validate(const HmmModel& model, double tolerance = kStochasticTolerance);

/// Builds a model from explicit parameters and validates it.
HmmModel make_model(StateSpace states, ObservationAlphabet alphabet,
                    std::vector<double> initial, Matrix transitions,
                    Matrix emissions);

/// Throws AlphabetError if an index is >= K and EmptyInputError if empty.
void check_observations(const HmmModel& model,
                        std::span<const std::size_t> observations);

/// Seeded random model. The initial distribution and transition rows are
/// |N(0,1)| + 1e-6 samples normalized to one; emission rows are drawn from a
/// symmetric Dirichlet(1). Identical (seed, N, K) give bit-identical models.
HmmModel init_model(StateSpace states, ObservationAlphabet alphabet,
                    std::uint64_t seed);

/// Scaled forward/backward variables.
///
/// Row t of `alpha` is Pr(X_t = i | Y_1..Y_t) and sums to one. `beta` uses
/// the matching convention beta_hat_t = beta_t / Pr(Y_{t+1}..Y_T | Y_1..Y_t),
/// so the final row is all ones and alpha_hat * beta_hat is the state
/// posterior. scale[t] = 1 / Pr(Y_t | Y_1..Y_{t-1}).
struct ForwardBackwardTables {
  Matrix alpha;
  Matrix beta;
  std::vector<double> scale;
  double log_likelihood = 0.0;  // = -sum log(scale[t])
};

/// Throws AlphabetError for bad indices and ModelError when the sequence has
/// probability zero under the model.
ForwardBackwardTables forward_backward(const HmmModel& model,
                                       std::span<const std::size_t> observations);

struct PosteriorTables {
  Matrix gamma;            // T x N state posteriors
  std::vector<double> xi;  // (T-1) x N x N pairwise posteriors, row-major
  std::size_t state_count = 0;

  double pair(std::size_t t, std::size_t i, std::size_t j) const {
    return xi[(t * state_count + i) * state_count + j];
  }
};

PosteriorTables posteriors(const HmmModel& model,
                           std::span<const std::size_t> observations,
                           const ForwardBackwardTables& tables);

/// Emission probabilities are floored here after every re-estimation.
inline constexpr double kEmissionFloor = 1e-12;

struct StepResult {
  HmmModel model;
  double log_likelihood = 0.0;  // of the input model
};

/// One Baum-Welch re-estimation. States with zero expected occupancy keep
/// their previous transition/emission rows; with a single observation the
/// transition matrix is returned unchanged.
StepResult baum_welch_step(const HmmModel& model,
                           std::span<const std::size_t> observations);

/// Largest absolute elementwise difference across initial, Q and E.
double max_abs_difference(const HmmModel& a, const HmmModel& b);

struct TrainOptions {
  std::size_t max_iterations = 1000;
  double tolerance = 1e-6;
};

struct TrainReport {
  std::size_t iterations = 0;
  bool converged = false;
  /// Entry k is the log-likelihood of the model entering step k; the final
  /// entry is that of the returned model (size == iterations + 1).
  std::vector<double> log_likelihood_history;
  double final_delta = 0.0;
};

struct TrainResult {
  HmmModel model;
  TrainReport report;
};

/// Called after every step with the 1-based iteration and the new model.
using TrainObserver = std::function<void(std::size_t, const HmmModel&)>;

/// Iterates baum_welch_step until the parameter change drops below
/// options.tolerance or options.max_iterations steps have run.
TrainResult train(HmmModel model, std::span<const std::size_t> observations,
                  const TrainOptions& options = {},
                  const TrainObserver& observer = {});

struct DecodedPath {
  std::vector<std::size_t> states;
  double log_probability = 0.0;
  /// False when every state path has probability zero; states is then all
  /// zeros and log_probability is -infinity.
  bool feasible = true;
};

/// Most probable hidden path, computed in log space. Ties go to the lowest
/// state index, both at each recursion step and at termination; log scores
/// within a relative 1e-12 of each other count as tied.
DecodedPath viterbi(const HmmModel& model,
                    std::span<const std::size_t> observations);

}  // namespace iotmonitor

#endif  // IOTMONITOR_HMM_HPP
