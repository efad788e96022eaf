#pragma once

#include "distillq/emulator.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace distillq {

/// How the open end of a trace is treated when building the chain.
enum class Closure : std::uint8_t {
  /// Probabilities include one extra edge from the last occupancy back to the
  /// first: the trace is one period of a repeatedly executed assembly, and the
  /// stationary law equals the trace's time-average occupancy.
  Restart,
  /// Pure pair tally. A final state without outgoing transitions becomes
  /// absorbing.
  None,
};

/// Sparse DTMC over observed occupancy values. `counts` hold the raw tally of
/// consecutive pairs; `probs` are the row-normalized transition probabilities.
class TransitionMatrix {
public:
  struct Entry {
    std::size_t col = 0;
    std::uint64_t count = 0;
    double prob = 0.0;
  };

  TransitionMatrix() = default;

  /// Chain given directly by probabilities (counts are zero). Rows must sum
  /// to one within `tolerance`; they are renormalized exactly afterwards.
  static TransitionMatrix
  from_probabilities(std::vector<std::size_t> states,
                     const std::vector<std::vector<double>>& probs,
                     double tolerance = 1e-9);

  /// Chain given by a count table; probabilities are count / row sum.
  static TransitionMatrix
  from_counts(std::vector<std::size_t> states,
              const std::vector<std::vector<std::uint64_t>>& counts);

  /// Attaches observed pair counts to a probability matrix (e.g. one read
  /// back from JSON). Counts may only sit on edges with positive probability.
  void set_counts(const std::vector<std::vector<std::uint64_t>>& counts);

  [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
  [[nodiscard]] const std::vector<std::size_t>& states() const noexcept {
    return states_;
  }
  [[nodiscard]] std::span<const Entry> row(std::size_t i) const {
    return {entries_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  [[nodiscard]] double prob(std::size_t i, std::size_t j) const;
  [[nodiscard]] std::uint64_t count(std::size_t i, std::size_t j) const;
  /// Sum of all pair counts (trace length - 1 for trace-built chains).
  [[nodiscard]] std::uint64_t total_transitions() const noexcept {
    return total_;
  }
  /// Occurrences of state i as a transition source, restart edge included.
  [[nodiscard]] std::uint64_t visits(std::size_t i) const;
  [[nodiscard]] bool has_counts() const noexcept { return total_ > 0; }
  /// (from, to) indices of the restart edge, if the chain was closed.
  [[nodiscard]] const std::optional<std::pair<std::size_t, std::size_t>>&
  restart_edge() const noexcept {
    return restart_;
  }
  [[nodiscard]] std::optional<std::size_t> index_of(std::size_t state) const;

  [[nodiscard]] std::vector<std::vector<double>> dense_probs() const;
  [[nodiscard]] std::vector<std::vector<std::uint64_t>> dense_counts() const;

private:
  friend TransitionMatrix build_chain(std::span<const std::size_t>, Closure);

  std::vector<std::size_t> states_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Entry> entries_;
  std::uint64_t total_ = 0;
  std::optional<std::pair<std::size_t, std::size_t>> restart_;
};

/// Throws InsufficientTrace for fewer than two occupancy entries.
[[nodiscard]] TransitionMatrix build_chain(std::span<const std::size_t> occupancy,
                                           Closure closure = Closure::Restart);
[[nodiscard]] TransitionMatrix build_chain(const EmulationTrace& trace,
                                           Closure closure = Closure::Restart);

struct ErgodicityReport {
  bool irreducible = false;
  /// Every closed communicating class has period one.
  bool aperiodic = false;
  bool finite = true;
  bool ergodic = false;
  /// Period of the class that contains the lowest state.
  std::size_t period = 1;
  std::size_t closed_classes = 0;
  /// State values in the class of the lowest state.
  std::vector<std::size_t> communicating_class_of_zero;
};

[[nodiscard]] ErgodicityReport check_ergodic(const TransitionMatrix& matrix);

struct SteadyStateDistribution {
  std::vector<std::size_t> states;
  std::vector<double> nu;
  /// max_j |(nu P)_j - nu_j|
  double residual = 0.0;
  /// Solved on a closed class only; the other states carry zero mass.
  bool reduced = false;
  /// The class solved on is periodic: nu is a time-average, not a limit.
  bool periodic = false;
  std::string warning;
};

/// Solves nu = nu P, sum(nu) = 1 by a direct sparse solve.
[[nodiscard]] SteadyStateDistribution steady_state(const TransitionMatrix& matrix);

struct QueueMetrics {
  double v0 = 0.0;
  double v_full = 0.0;
  double mean_jobs = 0.0;
  double utilization = 0.0;
  std::size_t num_states = 0;
  std::uint64_t num_transitions = 0;
};

[[nodiscard]] QueueMetrics queue_metrics(const SteadyStateDistribution& nu,
                                         const TransitionMatrix& matrix);

} // namespace distillq
