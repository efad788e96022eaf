#pragma once

#include "distillq/circuit.hpp"
#include "distillq/rational.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace distillq {

/// Buffer size b, finite or unbounded. The system itself holds b + 1 jobs:
/// b buffered states plus the one being consumed.
class BufferCapacity {
public:
  constexpr BufferCapacity() = default;

  static constexpr BufferCapacity finite(std::size_t b) noexcept {
    return BufferCapacity(b);
  }
  static constexpr BufferCapacity infinite() noexcept { return {}; }
  /// "inf" or a non-negative integer.
  static BufferCapacity parse(std::string_view text);

  [[nodiscard]] constexpr bool is_infinite() const noexcept {
    return !value_.has_value();
  }
  /// Finite buffer size; throws std::bad_optional_access when infinite.
  [[nodiscard]] std::size_t value() const { return value_.value(); }
  /// Largest admissible number of jobs in the system.
  [[nodiscard]] constexpr std::size_t system_limit() const noexcept {
    return value_ ? *value_ + 1 : std::numeric_limits<std::size_t>::max();
  }
  [[nodiscard]] std::string to_string() const;

  friend constexpr bool operator==(const BufferCapacity&,
                                   const BufferCapacity&) = default;
  friend constexpr std::strong_ordering
  operator<=>(const BufferCapacity& a, const BufferCapacity& b) noexcept {
    if (a.is_infinite() || b.is_infinite()) {
      return a.is_infinite() <=> b.is_infinite();
    }
    return *a.value_ <=> *b.value_;
  }

private:
  constexpr explicit BufferCapacity(std::size_t b) : value_(b) {}
  std::optional<std::size_t> value_;
};

/// Pause production while the system is full.
struct StopWhenFull {
  friend bool operator==(const StopWhenFull&, const StopWhenFull&) = default;
};

/// Start a distillation only when the T gates among the next `window` slots
/// outnumber the states already available (buffered plus held).
struct Lookahead {
  std::size_t window = 1;
  friend bool operator==(const Lookahead&, const Lookahead&) = default;
};

using DistilleryPolicy = std::variant<StopWhenFull, Lookahead>;

[[nodiscard]] std::string to_string(const DistilleryPolicy& policy);
/// "stop-when-full" or "lookahead:<w>".
[[nodiscard]] DistilleryPolicy parse_policy(std::string_view text);

struct EmulatorConfig {
  /// Distilled states per slot, in (0, 1].
  Rational production_rate{16, 63};
  BufferCapacity buffer = BufferCapacity::infinite();
  DistilleryPolicy policy = StopWhenFull{};
  /// Steps until the first, already running distillation completes. Zero
  /// means nothing is in flight at step 1.
  std::size_t warmup_remaining = 1;
  std::size_t initial_stock = 0;
  /// When set, the distillery does nothing after this step.
  std::optional<std::size_t> production_cutoff;

  void validate() const;
};

/// Per-step event bits, combined when several happen in one step.
enum StepEvent : std::uint8_t {
  kIdle = 0,
  kDeliver = 1U << 0U,
  kHold = 1U << 1U,
  kPause = 1U << 2U,
  kConsume = 1U << 3U,
  kStall = 1U << 4U,
};

/// "deliver+consume", "stall", "idle", ...
[[nodiscard]] std::string format_events(std::uint8_t events);

struct EmulationTrace {
  /// k_0 .. k_D, jobs in the system after each step.
  std::vector<std::size_t> occupancy;
  /// events[t] describes step t; events[0] is the initial state.
  std::vector<std::uint8_t> events;
  std::size_t stall_steps = 0;
  std::size_t pause_steps = 0;
  std::size_t produced = 0;
  std::size_t consumed = 0;
  std::size_t assembly_depth = 0;
  std::size_t t_slots = 0;
  /// A completed state is waiting for room at the end of the run.
  bool held_at_end = false;
  /// False only when production was cut off before the demand was covered.
  bool completed = true;
};

[[nodiscard]] EmulationTrace emulate(const SlotTimeline& timeline,
                                     const EmulatorConfig& config);

[[nodiscard]] inline std::size_t
assembly_depth(const EmulationTrace& trace) noexcept {
  return trace.assembly_depth;
}

struct ShutdownReport {
  std::size_t shutdown_step = 0;
  bool verified = false;
  std::size_t depth = 0;
  std::size_t depth_with_shutdown = 0;
};

/// Earliest step from which the stock already covers every remaining T gate,
/// re-checked by emulating with the distillery switched off after that step.
[[nodiscard]] ShutdownReport shutdown_time(const SlotTimeline& timeline,
                                           const EmulatorConfig& config);

} // namespace distillq
