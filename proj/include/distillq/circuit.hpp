#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace distillq {

enum class GateKind : std::uint8_t { T, H, S, X, Z, CX, CZ, M };

/// Lower-case gate-list mnemonic ("t", "cx", ...).
[[nodiscard]] std::string_view mnemonic(GateKind kind) noexcept;
/// Case-insensitive inverse of mnemonic().
[[nodiscard]] std::optional<GateKind> gate_kind_from_mnemonic(std::string_view);
/// Number of qubit targets a gate of this kind acts on (1 or 2).
[[nodiscard]] std::size_t arity(GateKind kind) noexcept;

using Qubit = std::uint32_t;

struct Gate {
  GateKind kind = GateKind::H;
  std::vector<Qubit> targets;

  [[nodiscard]] bool is_t() const noexcept { return kind == GateKind::T; }
  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Totally ordered Clifford+T gate list. Parallelism is not represented.
struct Circuit {
  std::size_t n_qubits = 0;
  std::vector<Gate> gates;
  std::string label;

  [[nodiscard]] std::size_t t_count() const noexcept;
  /// Checks arity, distinct two-qubit targets and that every target is
  /// below n_qubits. Throws on the first violation.
  void validate() const;

  /// Equality ignores the free-text label.
  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.n_qubits == b.n_qubits && a.gates == b.gates;
  }
};

enum class AdderShape : std::uint8_t { Uniform, Burst, Tapered };

[[nodiscard]] std::string_view to_string(AdderShape shape) noexcept;
/// Accepts "uniform", "burst" or "tapered"; throws InvalidProfile otherwise.
[[nodiscard]] AdderShape parse_adder_shape(std::string_view text);

/// Stage model of a carry-ripple adder. Each stage is `slots_per_stage` gates
/// long and holds `t_per_stage` T gates.
struct AdderProfile {
  AdderShape shape = AdderShape::Uniform;
  std::size_t slots_per_stage = 18;
  std::size_t t_per_stage = 4;
  /// Offsets of the T gates inside a stage. Empty selects the shape default
  /// ({1,5,9,13} for uniform, {1,2,3,4} for burst). Ignored by tapered.
  std::vector<std::size_t> t_offsets;
  bool extra_stage = false;

  static AdderProfile defaults(AdderShape shape);

  /// Offsets after applying the shape default.
  [[nodiscard]] std::vector<std::size_t> effective_offsets() const;
  void validate() const;
};

/// Builds the sequential gate list of an n-qubit adder: n-1 stages, or n when
/// `extra_stage` is set. Clifford identities are fixed but arbitrary.
[[nodiscard]] Circuit generate_adder(std::size_t n, const AdderProfile& profile);

/// Parses the `.ctq` gate-list format; see serialize_circuit().
[[nodiscard]] Circuit parse_circuit(std::string_view text,
                                    std::string label = {});

/// Emits `qubits <k>` followed by one gate per line.
[[nodiscard]] std::string serialize_circuit(const Circuit& circuit);

enum class Slot : std::uint8_t { Clifford, T };

/// One slot per gate: the discrete-time main track.
struct SlotTimeline {
  std::vector<Slot> slots;
  std::string source;

  [[nodiscard]] std::size_t size() const noexcept { return slots.size(); }
  [[nodiscard]] std::size_t t_count() const noexcept;
};

[[nodiscard]] SlotTimeline sequentialize(const Circuit& circuit);

struct CircuitStats {
  std::size_t t_count = 0;
  std::size_t clifford_count = 0;
  std::size_t slot_count = 0;
  /// Worst case with sequential distillation: every T is its own layer.
  std::size_t sequential_t_depth = 0;

  friend bool operator==(const CircuitStats&, const CircuitStats&) = default;
};

[[nodiscard]] CircuitStats circuit_stats(const Circuit& circuit);

} // namespace distillq
