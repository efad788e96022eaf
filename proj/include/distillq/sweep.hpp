#pragma once

#include "distillq/circuit.hpp"
#include "distillq/emulator.hpp"
#include "distillq/markov.hpp"
#include "distillq/rational.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace distillq {

/// Everything the pipeline derives from one emulation.
struct RunAnalysis {
  EmulationTrace trace;
  TransitionMatrix matrix;
  ErgodicityReport ergodicity;
  SteadyStateDistribution steady;
  QueueMetrics metrics;
};

/// emulate -> build_chain -> check_ergodic -> steady_state -> queue_metrics.
[[nodiscard]] RunAnalysis analyze(const SlotTimeline& timeline,
                                  const EmulatorConfig& config,
                                  Closure closure = Closure::Restart);

struct SweepConfig {
  std::vector<BufferCapacity> capacities;
  /// Buffer field is overridden per row.
  EmulatorConfig base;
};

struct SweepRow {
  BufferCapacity capacity;
  std::size_t assembly_depth = 0;
  std::size_t stall_steps = 0;
  std::size_t pause_steps = 0;
  /// Absent when the chain analysis failed; see `error`.
  std::optional<QueueMetrics> metrics;
  bool ergodic = false;
  std::string warning;
  std::string error;
};

struct SweepReport {
  std::size_t qubits = 0;
  /// Ordered by capacity, infinite last.
  std::vector<SweepRow> rows;
  std::size_t baseline_depth = 0;
};

/// One emulation + chain + metrics per capacity. The infinite-capacity
/// baseline is always run, even when not requested.
[[nodiscard]] SweepReport sweep_buffers(const Circuit& circuit,
                                        const SweepConfig& config);

/// Smallest finite capacity reaching the baseline depth, else the smallest
/// capacity with the lowest finite depth.
[[nodiscard]] BufferCapacity optimal_buffer(const SweepReport& report);

/// One row of the published results, keyed by adder width.
struct ReferenceRow {
  std::size_t qubits = 0;
  double mean_jobs_size7 = 0.0;
  double mean_jobs_infinite = 0.0;
  std::size_t states_infinite = 0;
  double utilization = 0.0;
  std::size_t transitions = 0;
};

using ReferenceTable = std::vector<ReferenceRow>;

/// The nine published rows, n = 16 .. 2048.
[[nodiscard]] const ReferenceTable& reference_table();

/// Our own run in the reference column schema.
using Table1Row = ReferenceRow;

/// Runs the adder of width n at b = 7 and b = inf. Utilization comes from
/// the infinite-buffer chain.
[[nodiscard]] Table1Row table1_row(std::size_t n, const AdderProfile& profile,
                                   const EmulatorConfig& base = {});

struct CalibrationWeights {
  double transitions = 1.0;
  double states = 1.0;
  double utilization = 1.0;
  double mean_jobs_infinite = 1.0;
};

struct RowError {
  std::size_t qubits = 0;
  double transitions = 0.0; ///< relative
  double states = 0.0;      ///< relative
  double utilization = 0.0; ///< absolute
  double mean_jobs_infinite = 0.0; ///< relative
};

struct CalibrationCandidate {
  Rational rate;
  AdderShape shape = AdderShape::Uniform;
  double objective = 0.0;
};

struct CalibrationResult {
  Rational best_rate;
  AdderShape best_shape = AdderShape::Uniform;
  AdderProfile best_profile;
  std::vector<RowError> per_n_errors;
  double objective = 0.0;
  /// Every grid point in grid order.
  std::vector<CalibrationCandidate> candidates;
};

/// The grid used when none is given.
[[nodiscard]] std::vector<Rational> default_rate_grid();

/// Grid search over (rate, shape) scoring the infinite-buffer pipeline
/// against `reference` rows for `ns`. Ties keep the earlier grid point.
[[nodiscard]] CalibrationResult
calibrate(const ReferenceTable& reference, std::span<const Rational> rate_grid,
          std::span<const AdderShape> shapes, std::span<const std::size_t> ns,
          const EmulatorConfig& base = {}, const CalibrationWeights& weights = {});

} // namespace distillq
