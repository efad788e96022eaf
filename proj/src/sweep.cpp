#include "distillq/sweep.hpp"

#include "distillq/error.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>

namespace distillq {

RunAnalysis analyze(const SlotTimeline& timeline, const EmulatorConfig& config,
                    Closure closure) {
  RunAnalysis run;
  run.trace = emulate(timeline, config);
  run.matrix = build_chain(run.trace, closure);
  run.ergodicity = check_ergodic(run.matrix);
  run.steady = steady_state(run.matrix);
  run.metrics = queue_metrics(run.steady, run.matrix);
  return run;
}

namespace {

SweepRow sweep_row(const SlotTimeline& timeline, const EmulatorConfig& base,
                   BufferCapacity capacity) {
  SweepRow row;
  row.capacity = capacity;
  auto cfg = base;
  cfg.buffer = capacity;
  const auto trace = emulate(timeline, cfg);
  row.assembly_depth = trace.assembly_depth;
  row.stall_steps = trace.stall_steps;
  row.pause_steps = trace.pause_steps;
  try {
    const auto matrix = build_chain(trace);
    const auto erg = check_ergodic(matrix);
    const auto nu = steady_state(matrix);
    row.ergodic = erg.ergodic;
    row.warning = nu.warning;
    row.metrics = queue_metrics(nu, matrix);
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

} // namespace

SweepReport sweep_buffers(const Circuit& circuit, const SweepConfig& config) {
  if (config.capacities.empty()) {
    throw InvalidConfig("sweep needs at least one capacity");
  }
  auto capacities = config.capacities;
  std::sort(capacities.begin(), capacities.end());
  if (std::adjacent_find(capacities.begin(), capacities.end()) !=
      capacities.end()) {
    throw InvalidConfig("sweep capacities must be distinct");
  }
  config.base.validate();
  const auto timeline = sequentialize(circuit);

  // Rows are independent; results land in capacity order.
  SweepReport report;
  report.qubits = circuit.n_qubits;
  report.rows.resize(capacities.size());
  detail::parallel_for(capacities.size(), [&](std::size_t i) {
    auto cfg = config.base;
    // The stock must fit each capacity.
    if (!capacities[i].is_infinite()) {
      cfg.initial_stock = std::min(cfg.initial_stock, capacities[i].value());
    }
    report.rows[i] = sweep_row(timeline, cfg, capacities[i]);
  });
  if (report.rows.back().capacity.is_infinite()) {
    report.baseline_depth = report.rows.back().assembly_depth;
  } else {
    auto cfg = config.base;
    cfg.buffer = BufferCapacity::infinite();
    report.baseline_depth = emulate(timeline, cfg).assembly_depth;
  }
  return report;
}

BufferCapacity optimal_buffer(const SweepReport& report) {
  if (report.rows.empty()) {
    throw InvalidConfig("empty sweep report");
  }
  const SweepRow* best = nullptr;
  for (const auto& row : report.rows) {
    if (row.capacity.is_infinite()) {
      continue;
    }
    if (row.assembly_depth == report.baseline_depth) {
      return row.capacity;
    }
    if (best == nullptr || row.assembly_depth < best->assembly_depth) {
      best = &row;
    }
  }
  return best != nullptr ? best->capacity : BufferCapacity::infinite();
}

Table1Row table1_row(std::size_t n, const AdderProfile& profile,
                     const EmulatorConfig& base) {
  const auto timeline = sequentialize(generate_adder(n, profile));
  auto cfg = base;
  cfg.buffer = BufferCapacity::infinite();
  const auto inf = analyze(timeline, cfg);
  cfg.buffer = BufferCapacity::finite(7);
  cfg.initial_stock = std::min<std::size_t>(cfg.initial_stock, 7);
  const auto seven = analyze(timeline, cfg);

  Table1Row row;
  row.qubits = n;
  row.mean_jobs_size7 = seven.metrics.mean_jobs;
  row.mean_jobs_infinite = inf.metrics.mean_jobs;
  row.states_infinite = inf.metrics.num_states;
  row.utilization = inf.metrics.utilization;
  row.transitions = inf.metrics.num_transitions;
  return row;
}

namespace {

double relative(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

struct Scored {
  double objective = 0.0;
  std::vector<RowError> errors;
};

Scored score(const std::vector<const ReferenceRow*>& refs, Rational rate,
             AdderShape shape, const EmulatorConfig& base,
             const CalibrationWeights& w) {
  Scored s;
  auto cfg = base;
  cfg.production_rate = rate;
  cfg.buffer = BufferCapacity::infinite();
  for (const auto* ref : refs) {
    const auto timeline =
        sequentialize(generate_adder(ref->qubits, AdderProfile::defaults(shape)));
    const auto m = analyze(timeline, cfg).metrics;
    RowError e;
    e.qubits = ref->qubits;
    e.transitions = relative(static_cast<double>(m.num_transitions),
                             static_cast<double>(ref->transitions));
    e.states = relative(static_cast<double>(m.num_states),
                        static_cast<double>(ref->states_infinite));
    e.utilization = std::abs(m.utilization - ref->utilization);
    e.mean_jobs_infinite = relative(m.mean_jobs, ref->mean_jobs_infinite);
    s.objective += w.transitions * e.transitions + w.states * e.states +
                   w.utilization * e.utilization +
                   w.mean_jobs_infinite * e.mean_jobs_infinite;
    s.errors.push_back(e);
  }
  s.objective /= static_cast<double>(refs.size());
  return s;
}

} // namespace

CalibrationResult calibrate(const ReferenceTable& reference,
                            std::span<const Rational> rate_grid,
                            std::span<const AdderShape> shapes,
                            std::span<const std::size_t> ns,
                            const EmulatorConfig& base,
                            const CalibrationWeights& weights) {
  if (rate_grid.empty() || shapes.empty() || ns.empty()) {
    throw EmptyGrid();
  }
  std::vector<const ReferenceRow*> refs;
  for (const auto n : ns) {
    const auto it = std::find_if(reference.begin(), reference.end(),
                                 [n](const auto& r) { return r.qubits == n; });
    if (it == reference.end()) {
      throw InvalidConfig("no reference row for n = " + std::to_string(n));
    }
    refs.push_back(&*it);
  }
  for (const auto& r : rate_grid) {
    auto cfg = base;
    cfg.production_rate = r;
    cfg.validate();
  }

  std::vector<CalibrationCandidate> candidates;
  for (const auto& rate : rate_grid) {
    for (const auto shape : shapes) {
      candidates.push_back({rate, shape, 0.0});
    }
  }
  std::vector<Scored> scored(candidates.size());
  detail::parallel_for(candidates.size(), [&](std::size_t i) {
    scored[i] = score(refs, candidates[i].rate, candidates[i].shape, base, weights);
  });
  CalibrationResult result;
  std::size_t best = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    candidates[i].objective = scored[i].objective;
    if (scored[i].objective < scored[best].objective) {
      best = i;
    }
  }
  result.best_rate = candidates[best].rate;
  result.best_shape = candidates[best].shape;
  result.best_profile = AdderProfile::defaults(result.best_shape);
  result.objective = scored[best].objective;
  result.per_n_errors = std::move(scored[best].errors);
  result.candidates = std::move(candidates);
  return result;
}

} // namespace distillq
