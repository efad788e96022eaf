#pragma once

#include "distillq/emulator.hpp"
#include "distillq/markov.hpp"
#include "distillq/sweep.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace distillq::io {

using nlohmann::json;

/// Fixed-point text with `decimals` digits; "-0.000000" is normalized.
[[nodiscard]] std::string fixed(double value, int decimals = 6);
/// Value rounded to `decimals` digits, for JSON output.
[[nodiscard]] double rounded(double value, int decimals = 6);

/// "0..8,inf", "3", "0,2,4" -> capacities in the order given.
[[nodiscard]] std::vector<BufferCapacity> parse_buffer_list(std::string_view text);
/// "16,32,64" -> sizes.
[[nodiscard]] std::vector<std::size_t> parse_size_list(std::string_view text);

// Config document: {"rate": "16/63" | 0.25, "buffer": 7 | "inf",
//                   "policy": "stop-when-full" | {"lookahead": w},
//                   "warmup": 1, "stock": 0}
[[nodiscard]] EmulatorConfig config_from_json(const json& doc,
                                              EmulatorConfig base = {});
[[nodiscard]] json config_to_json(const EmulatorConfig& config);

/// Columns step, occupancy, event.
[[nodiscard]] std::string trace_to_csv(const EmulationTrace& trace);
[[nodiscard]] json trace_to_json(const EmulationTrace& trace);
/// Reads the occupancy column back from trace_to_csv() output.
[[nodiscard]] std::vector<std::size_t> occupancy_from_csv(std::string_view text);

[[nodiscard]] json matrix_to_json(const TransitionMatrix& matrix);
/// Uses "probs" when present (with "counts" attached if given), else
/// normalizes "counts". "states" defaults to 0..N-1.
[[nodiscard]] TransitionMatrix matrix_from_json(const json& doc);

[[nodiscard]] json ergodicity_to_json(const ErgodicityReport& report);
[[nodiscard]] json steady_to_json(const SteadyStateDistribution& nu);
[[nodiscard]] json metrics_to_json(const QueueMetrics& metrics);
[[nodiscard]] std::string metrics_csv_header();
[[nodiscard]] std::string metrics_csv_row(const QueueMetrics& metrics);

/// Header qubits,capacity,depth,stalls,pauses,v0,v_full,mean_jobs,
/// utilization,num_states,num_transitions. Failed rows leave metric cells
/// empty.
[[nodiscard]] std::string sweep_to_csv(const SweepReport& report);
[[nodiscard]] json sweep_to_json(const SweepReport& report);

/// Header qubits,mean_size7,mean_infinite,states_infinite,utilization,
/// transitions.
[[nodiscard]] std::string table1_to_csv(std::span<const Table1Row> rows);

[[nodiscard]] json calibration_to_json(const CalibrationResult& result);
[[nodiscard]] std::string calibration_to_csv(const CalibrationResult& result);

/// 64-bit FNV-1a, lower-case hex.
[[nodiscard]] std::string fnv1a64_hex(std::string_view bytes);

} // namespace distillq::io
