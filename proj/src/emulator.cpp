#include "distillq/emulator.hpp"

#include "distillq/error.hpp"

#include <charconv>

namespace distillq {

BufferCapacity BufferCapacity::parse(std::string_view text) {
  if (text == "inf" || text == "INF" || text == "Inf") {
    return infinite();
  }
  std::size_t value = 0;
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), last, value);
  if (text.empty() || ec != std::errc{} || ptr != last) {
    throw InvalidConfig("bad buffer capacity '" + std::string(text) + "'");
  }
  return finite(value);
}

std::string BufferCapacity::to_string() const {
  return value_ ? std::to_string(*value_) : std::string("inf");
}

std::string to_string(const DistilleryPolicy& policy) {
  if (const auto* la = std::get_if<Lookahead>(&policy)) {
    return "lookahead:" + std::to_string(la->window);
  }
  return "stop-when-full";
}

DistilleryPolicy parse_policy(std::string_view text) {
  if (text == "stop-when-full") {
    return StopWhenFull{};
  }
  constexpr std::string_view prefix = "lookahead:";
  if (text.substr(0, prefix.size()) == prefix) {
    const auto rest = text.substr(prefix.size());
    std::size_t window = 0;
    const auto* last = rest.data() + rest.size();
    const auto [ptr, ec] = std::from_chars(rest.data(), last, window);
    if (!rest.empty() && ec == std::errc{} && ptr == last && window > 0) {
      return Lookahead{window};
    }
  }
  throw InvalidConfig("bad policy '" + std::string(text) +
                      "' (expected stop-when-full or lookahead:<w>)");
}

void EmulatorConfig::validate() const {
  if (production_rate.num() <= 0 || production_rate.num() > production_rate.den()) {
    throw InvalidConfig("production rate must lie in (0, 1], got " +
                        production_rate.to_string());
  }
  if (!buffer.is_infinite() && initial_stock > buffer.value()) {
    throw InvalidConfig("initial stock exceeds buffer capacity");
  }
  if (const auto* la = std::get_if<Lookahead>(&policy); la && la->window == 0) {
    throw InvalidConfig("lookahead window must be positive");
  }
}

std::string format_events(std::uint8_t events) {
  if (events == kIdle) {
    return "idle";
  }
  static constexpr std::pair<StepEvent, std::string_view> kNames[] = {
      {kDeliver, "deliver"}, {kHold, "hold"},   {kPause, "pause"},
      {kConsume, "consume"}, {kStall, "stall"}};
  std::string out;
  for (const auto& [bit, name] : kNames) {
    if ((events & bit) != 0) {
      if (!out.empty()) {
        out += '+';
      }
      out += name;
    }
  }
  return out;
}

namespace {

// Distillery state machine. Production is scheduled in integer steps: a
// running distillation adds `num` to an accumulator each step and completes
// once it reaches `den`; the remainder carries into a distillation that starts
// straight away and is dropped when the distillery has to pause.
class Distillery {
public:
  Distillery(const EmulatorConfig& cfg, const std::vector<std::size_t>& t_prefix)
      : num_(static_cast<std::uint64_t>(cfg.production_rate.num())),
        den_(static_cast<std::uint64_t>(cfg.production_rate.den())),
        limit_(cfg.buffer.system_limit()), policy_(cfg.policy),
        t_prefix_(t_prefix), running_(cfg.warmup_remaining > 0),
        warmup_left_(cfg.warmup_remaining) {}

  // Runs the distillery phase of one step. `next_slot` is the index of the
  // pending main-track slot.
  std::uint8_t step(std::size_t& occupancy, std::size_t next_slot,
                    std::size_t& produced) {
    std::uint8_t ev = kIdle;
    if (held_) {
      if (occupancy < limit_) {
        ++occupancy;
        held_ = false;
        ev |= kDeliver;
      } else {
        return ev | kHold;
      }
    }
    if (!running_) {
      if (!may_start(occupancy, next_slot)) {
        return ev | kPause;
      }
      running_ = true;
      acc_ = 0;
      warmup_left_ = 0;
    }
    if (!advance()) {
      return ev;
    }
    ++produced;
    if (occupancy < limit_) {
      ++occupancy;
      ev |= kDeliver;
    } else {
      held_ = true;
      ev |= kHold;
    }
    running_ = !held_ && may_start(occupancy, next_slot);
    if (!running_) {
      acc_ = 0;
    }
    return ev;
  }

  [[nodiscard]] bool held() const noexcept { return held_; }

private:
  bool advance() {
    if (warmup_left_ > 0) {
      return --warmup_left_ == 0;
    }
    acc_ += num_;
    if (acc_ >= den_) {
      acc_ -= den_;
      return true;
    }
    return false;
  }

  [[nodiscard]] bool may_start(std::size_t occupancy,
                               std::size_t next_slot) const {
    if (occupancy >= limit_) {
      return false;
    }
    if (const auto* la = std::get_if<Lookahead>(&policy_)) {
      const auto n = t_prefix_.size() - 1;
      const auto end = std::min(n, next_slot + la->window);
      const auto demand = t_prefix_[end] - t_prefix_[std::min(n, next_slot)];
      return demand > occupancy + (held_ ? 1 : 0);
    }
    return true;
  }

  std::uint64_t num_;
  std::uint64_t den_;
  std::size_t limit_;
  DistilleryPolicy policy_;
  const std::vector<std::size_t>& t_prefix_;
  bool running_;
  bool held_ = false;
  std::size_t warmup_left_;
  std::uint64_t acc_ = 0;
};

} // namespace

EmulationTrace emulate(const SlotTimeline& timeline,
                       const EmulatorConfig& config) {
  config.validate();
  const auto& slots = timeline.slots;

  std::vector<std::size_t> t_prefix(slots.size() + 1, 0);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    t_prefix[i + 1] = t_prefix[i] + (slots[i] == Slot::T ? 1 : 0);
  }

  EmulationTrace trace;
  trace.t_slots = t_prefix.back();
  trace.occupancy.reserve(slots.size() + 1);
  trace.events.reserve(slots.size() + 1);
  std::size_t occupancy = config.initial_stock;
  trace.occupancy.push_back(occupancy);
  trace.events.push_back(kIdle);

  Distillery distillery(config, t_prefix);
  std::size_t next = 0;
  std::size_t t = 0;
  while (next < slots.size()) {
    ++t;
    const bool producing =
        !config.production_cutoff || t <= *config.production_cutoff;
    std::uint8_t ev = kIdle;
    if (producing) {
      ev = distillery.step(occupancy, next, trace.produced);
      if ((ev & (kPause | kHold)) != 0) {
        ++trace.pause_steps;
      }
    }
    if (slots[next] == Slot::Clifford) {
      ++next;
    } else if (occupancy > 0) {
      --occupancy;
      ++trace.consumed;
      ++next;
      ev |= kConsume;
    } else {
      ++trace.stall_steps;
      ev |= kStall;
    }
    trace.occupancy.push_back(occupancy);
    trace.events.push_back(ev);
    if ((ev & kStall) != 0 && config.production_cutoff &&
        t >= *config.production_cutoff) {
      // Nothing will ever arrive again.
      trace.completed = false;
      break;
    }
  }
  trace.assembly_depth = t;
  trace.held_at_end = distillery.held();
  return trace;
}

ShutdownReport shutdown_time(const SlotTimeline& timeline,
                             const EmulatorConfig& config) {
  const auto full = emulate(timeline, config);
  ShutdownReport report;
  report.depth = full.assembly_depth;

  std::size_t remaining = full.t_slots;
  std::size_t step = 0;
  for (; step <= full.assembly_depth; ++step) {
    if ((full.events[step] & kConsume) != 0) {
      --remaining;
    }
    if (full.occupancy[step] >= remaining) {
      break;
    }
  }
  report.shutdown_step = step;

  auto cut = config;
  cut.production_cutoff = step;
  const auto rerun = emulate(timeline, cut);
  report.depth_with_shutdown = rerun.assembly_depth;
  report.verified = rerun.completed && rerun.assembly_depth == full.assembly_depth;
  return report;
}

} // namespace distillq
