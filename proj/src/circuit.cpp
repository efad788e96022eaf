#include "distillq/circuit.hpp"

#include "distillq/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <sstream>

namespace distillq {

namespace {

constexpr std::array kMnemonics{std::string_view{"t"},  std::string_view{"h"},
                                std::string_view{"s"},  std::string_view{"x"},
                                std::string_view{"z"},  std::string_view{"cx"},
                                std::string_view{"cz"}, std::string_view{"m"}};

// Clifford filler pattern for generated stages: (kind, uses second qubit).
struct Filler {
  GateKind kind;
  bool on_carry;
};
constexpr std::array kFillers{
    Filler{GateKind::CX, false}, Filler{GateKind::H, true},
    Filler{GateKind::S, false},  Filler{GateKind::CX, true},
    Filler{GateKind::Z, true},   Filler{GateKind::CZ, false},
    Filler{GateKind::X, false},  Filler{GateKind::H, false}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    const auto start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    if (i > start) {
      tokens.push_back(line.substr(start, i - start));
    }
  }
  return tokens;
}

std::optional<Qubit> parse_index(std::string_view token) {
  Qubit value = 0;
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), last, value);
  if (token.empty() || ec != std::errc{} || ptr != last) {
    return std::nullopt;
  }
  return value;
}

// T positions of the tapered shape over `stages` stages.
std::vector<std::size_t> tapered_positions(const AdderProfile& p,
                                           std::size_t stages) {
  const auto total = p.slots_per_stage * stages;
  const auto head = 4 * stages;
  std::vector<std::size_t> pos;
  pos.reserve(p.t_per_stage * stages);
  for (std::size_t j = 0; j < stages; ++j) {
    pos.push_back(4 * j + 1);
  }
  const auto remaining = (p.t_per_stage - 1) * stages;
  const auto tail = total - head;
  for (std::size_t i = 0; i < remaining; ++i) {
    pos.push_back(head + (2 * i + 1) * tail / (2 * remaining));
  }
  return pos;
}

} // namespace

std::string_view mnemonic(GateKind kind) noexcept {
  return kMnemonics[static_cast<std::size_t>(kind)];
}

std::optional<GateKind> gate_kind_from_mnemonic(std::string_view text) {
  const auto key = lower(text);
  for (std::size_t i = 0; i < kMnemonics.size(); ++i) {
    if (kMnemonics[i] == key) {
      return static_cast<GateKind>(i);
    }
  }
  return std::nullopt;
}

std::size_t arity(GateKind kind) noexcept {
  return kind == GateKind::CX || kind == GateKind::CZ ? 2 : 1;
}

std::size_t Circuit::t_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(gates.begin(), gates.end(),
                    [](const Gate& g) { return g.is_t(); }));
}

void Circuit::validate() const {
  if (n_qubits == 0) {
    throw InvalidQubitCount("circuit must have at least one qubit");
  }
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& g = gates[i];
    const auto where = "gate " + std::to_string(i) + " (" +
                       std::string(mnemonic(g.kind)) + ")";
    if (g.targets.size() != arity(g.kind)) {
      throw Error(where + ": expected " + std::to_string(arity(g.kind)) +
                  " targets");
    }
    for (const auto q : g.targets) {
      if (q >= n_qubits) {
        throw Error(where + ": target " + std::to_string(q) +
                    " out of range");
      }
    }
    if (g.targets.size() == 2 && g.targets[0] == g.targets[1]) {
      throw Error(where + ": targets must be distinct");
    }
  }
}

std::string_view to_string(AdderShape shape) noexcept {
  switch (shape) {
  case AdderShape::Uniform:
    return "uniform";
  case AdderShape::Burst:
    return "burst";
  case AdderShape::Tapered:
    return "tapered";
  }
  return "uniform";
}

AdderShape parse_adder_shape(std::string_view text) {
  const auto key = lower(text);
  if (key == "uniform") {
    return AdderShape::Uniform;
  }
  if (key == "burst") {
    return AdderShape::Burst;
  }
  if (key == "tapered") {
    return AdderShape::Tapered;
  }
  throw InvalidProfile("unknown adder profile '" + std::string(text) + "'");
}

AdderProfile AdderProfile::defaults(AdderShape shape) {
  AdderProfile p;
  p.shape = shape;
  return p;
}

std::vector<std::size_t> AdderProfile::effective_offsets() const {
  if (!t_offsets.empty()) {
    return t_offsets;
  }
  if (shape == AdderShape::Burst) {
    return {1, 2, 3, 4};
  }
  return {1, 5, 9, 13};
}

void AdderProfile::validate() const {
  if (slots_per_stage == 0 || t_per_stage == 0) {
    throw InvalidProfile("slots_per_stage and t_per_stage must be positive");
  }
  if (t_per_stage > slots_per_stage) {
    throw InvalidProfile("more T gates than slots in a stage");
  }
  if (shape == AdderShape::Tapered) {
    // Phase one uses 4 slots per stage for a single T gate.
    if (slots_per_stage < 4 + (t_per_stage - 1)) {
      throw InvalidProfile("tapered profile needs slots_per_stage >= t_per_stage + 3");
    }
    return;
  }
  const auto offsets = effective_offsets();
  if (offsets.size() != t_per_stage) {
    throw InvalidProfile("t_offsets must have t_per_stage entries");
  }
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (offsets[i] >= slots_per_stage) {
      throw InvalidProfile("t offset " + std::to_string(offsets[i]) +
                           " outside the stage");
    }
    if (i > 0 && offsets[i] <= offsets[i - 1]) {
      throw InvalidProfile("t offsets must be strictly increasing");
    }
  }
}

Circuit generate_adder(std::size_t n, const AdderProfile& profile) {
  if (n < 2) {
    throw InvalidQubitCount("adder needs at least 2 qubits, got " +
                            std::to_string(n));
  }
  profile.validate();
  const auto stages = profile.extra_stage ? n : n - 1;
  const auto total = profile.slots_per_stage * stages;

  std::vector<bool> is_t(total, false);
  if (profile.shape == AdderShape::Tapered) {
    for (const auto p : tapered_positions(profile, stages)) {
      is_t[p] = true;
    }
  } else {
    const auto offsets = profile.effective_offsets();
    for (std::size_t s = 0; s < stages; ++s) {
      for (const auto off : offsets) {
        is_t[s * profile.slots_per_stage + off] = true;
      }
    }
  }

  Circuit c;
  c.n_qubits = n;
  c.label = "adder" + std::to_string(n) + "-" + std::string(to_string(profile.shape)) +
            (profile.extra_stage ? "-extra" : "");
  c.gates.reserve(total);
  std::size_t t_seen = 0;
  for (std::size_t i = 0; i < total; ++i) {
    const auto stage = i / profile.slots_per_stage;
    const auto bit = static_cast<Qubit>(stage % n);
    const auto carry = static_cast<Qubit>((stage + 1) % n);
    if (is_t[i]) {
      c.gates.push_back({GateKind::T, {t_seen++ % 2 == 0 ? bit : carry}});
      continue;
    }
    const auto& f = kFillers[i % kFillers.size()];
    if (arity(f.kind) == 2) {
      c.gates.push_back({f.kind, f.on_carry ? std::vector<Qubit>{carry, bit}
                                            : std::vector<Qubit>{bit, carry}});
    } else {
      c.gates.push_back({f.kind, {f.on_carry ? carry : bit}});
    }
  }
  return c;
}

Circuit parse_circuit(std::string_view text, std::string label) {
  Circuit c;
  c.label = std::move(label);
  std::optional<std::size_t> header;
  Qubit max_index = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto tokens = split_ws(line);
    if (tokens.empty()) {
      if (end == text.size()) {
        break;
      }
      continue;
    }
    const auto head = lower(tokens[0]);
    if (head == "qubits") {
      if (header || !c.gates.empty()) {
        throw MalformedLine(line_no, "qubits header must come first, once");
      }
      const auto k = tokens.size() == 2 ? parse_index(tokens[1]) : std::nullopt;
      if (!k || *k == 0) {
        throw MalformedLine(line_no, "expected 'qubits <k>' with k > 0");
      }
      header = *k;
    } else {
      const auto kind = gate_kind_from_mnemonic(tokens[0]);
      if (!kind) {
        throw UnknownGate(line_no, "unknown gate '" + std::string(tokens[0]) + "'");
      }
      if (tokens.size() - 1 != arity(*kind)) {
        throw MalformedLine(line_no, "'" + std::string(tokens[0]) + "' takes " +
                                         std::to_string(arity(*kind)) +
                                         " qubit index(es)");
      }
      Gate g{*kind, {}};
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto q = parse_index(tokens[i]);
        if (!q) {
          throw MalformedLine(line_no, "bad qubit index '" +
                                           std::string(tokens[i]) + "'");
        }
        if (header && *q >= *header) {
          throw MalformedLine(line_no, "qubit " + std::to_string(*q) +
                                           " exceeds header count");
        }
        max_index = std::max(max_index, *q);
        g.targets.push_back(*q);
      }
      if (g.targets.size() == 2 && g.targets[0] == g.targets[1]) {
        throw MalformedLine(line_no, "two-qubit gate needs distinct targets");
      }
      c.gates.push_back(std::move(g));
    }
    if (end == text.size()) {
      break;
    }
  }
  if (c.gates.empty()) {
    throw EmptyCircuit();
  }
  c.n_qubits = header ? *header : static_cast<std::size_t>(max_index) + 1;
  return c;
}

std::string serialize_circuit(const Circuit& circuit) {
  std::ostringstream out;
  if (!circuit.label.empty()) {
    out << "# " << circuit.label << '\n';
  }
  out << "qubits " << circuit.n_qubits << '\n';
  for (const auto& g : circuit.gates) {
    out << mnemonic(g.kind);
    for (const auto q : g.targets) {
      out << ' ' << q;
    }
    out << '\n';
  }
  return out.str();
}

std::size_t SlotTimeline::t_count() const noexcept {
  return static_cast<std::size_t>(std::count(slots.begin(), slots.end(), Slot::T));
}

SlotTimeline sequentialize(const Circuit& circuit) {
  SlotTimeline timeline;
  timeline.source = circuit.label;
  timeline.slots.reserve(circuit.gates.size());
  for (const auto& g : circuit.gates) {
    timeline.slots.push_back(g.is_t() ? Slot::T : Slot::Clifford);
  }
  return timeline;
}

CircuitStats circuit_stats(const Circuit& circuit) {
  CircuitStats s;
  s.t_count = circuit.t_count();
  s.slot_count = circuit.gates.size();
  s.clifford_count = s.slot_count - s.t_count;
  s.sequential_t_depth = s.t_count;
  return s;
}

} // namespace distillq
