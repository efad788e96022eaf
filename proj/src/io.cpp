#include "distillq/io.hpp"

#include "distillq/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace distillq::io {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string out(buf);
  if (out.front() == '-' &&
      out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);
  }
  return out;
}

double rounded(double value, int decimals) {
  return std::stod(fixed(value, decimals));
}

namespace {

std::size_t parse_size(std::string_view token, std::string_view whole) {
  std::size_t value = 0;
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), last, value);
  if (token.empty() || ec != std::errc{} || ptr != last) {
    throw InvalidConfig("bad number '" + std::string(token) + "' in '" +
                        std::string(whole) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = text.find(sep, pos);
    out.push_back(text.substr(pos, next - pos));
    if (next == std::string_view::npos) {
      break;
    }
    pos = next + 1;
  }
  return out;
}

} // namespace

std::vector<BufferCapacity> parse_buffer_list(std::string_view text) {
  std::vector<BufferCapacity> out;
  for (const auto item : split(text, ',')) {
    if (const auto dots = item.find(".."); dots != std::string_view::npos) {
      const auto lo = parse_size(item.substr(0, dots), text);
      const auto hi = parse_size(item.substr(dots + 2), text);
      if (hi < lo) {
        throw InvalidConfig("empty buffer range '" + std::string(item) + "'");
      }
      for (auto b = lo; b <= hi; ++b) {
        out.push_back(BufferCapacity::finite(b));
      }
    } else {
      out.push_back(BufferCapacity::parse(item));
    }
  }
  return out;
}

std::vector<std::size_t> parse_size_list(std::string_view text) {
  std::vector<std::size_t> out;
  for (const auto item : split(text, ',')) {
    out.push_back(parse_size(item, text));
  }
  return out;
}

EmulatorConfig config_from_json(const json& doc, EmulatorConfig base) {
  if (!doc.is_object()) {
    throw InvalidConfig("config must be a JSON object");
  }
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "rate") {
        base.production_rate = value.is_string()
                                   ? Rational::parse(value.get<std::string>())
                                   : Rational::parse(value.dump());
      } else if (key == "buffer") {
        base.buffer = value.is_string()
                          ? BufferCapacity::parse(value.get<std::string>())
                          : BufferCapacity::finite(value.get<std::size_t>());
      } else if (key == "policy") {
        if (value.is_string()) {
          base.policy = parse_policy(value.get<std::string>());
        } else if (value.is_object() && value.contains("lookahead")) {
          base.policy = Lookahead{value.at("lookahead").get<std::size_t>()};
        } else {
          throw InvalidConfig("bad policy value " + value.dump());
        }
      } else if (key == "warmup") {
        base.warmup_remaining = value.get<std::size_t>();
      } else if (key == "stock") {
        base.initial_stock = value.get<std::size_t>();
      } else {
        throw InvalidConfig("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("config: ") + e.what());
  }
  base.validate();
  return base;
}

json config_to_json(const EmulatorConfig& config) {
  json policy;
  if (const auto* la = std::get_if<Lookahead>(&config.policy)) {
    policy = json{{"lookahead", la->window}};
  } else {
    policy = "stop-when-full";
  }
  json buffer = config.buffer.is_infinite() ? json("inf")
                                            : json(config.buffer.value());
  return json{{"rate", config.production_rate.to_string()},
              {"buffer", buffer},
              {"policy", policy},
              {"warmup", config.warmup_remaining},
              {"stock", config.initial_stock}};
}

std::string trace_to_csv(const EmulationTrace& trace) {
  std::string out = "step,occupancy,event\n";
  for (std::size_t t = 0; t < trace.occupancy.size(); ++t) {
    out += std::to_string(t);
    out += ',';
    out += std::to_string(trace.occupancy[t]);
    out += ',';
    out += format_events(trace.events[t]);
    out += '\n';
  }
  return out;
}

json trace_to_json(const EmulationTrace& trace) {
  return json{{"assembly_depth", trace.assembly_depth},
              {"stall_steps", trace.stall_steps},
              {"pause_steps", trace.pause_steps},
              {"produced", trace.produced},
              {"consumed", trace.consumed},
              {"t_slots", trace.t_slots},
              {"held_at_end", trace.held_at_end},
              {"completed", trace.completed},
              {"occupancy", trace.occupancy}};
}

std::vector<std::size_t> occupancy_from_csv(std::string_view text) {
  std::vector<std::size_t> out;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line.empty() || line_no == 1) {
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() < 2) {
      throw MalformedLine(line_no, "expected step,occupancy[,event]");
    }
    try {
      out.push_back(parse_size(cells[1], line));
    } catch (const InvalidConfig&) {
      throw MalformedLine(line_no, "bad occupancy '" + std::string(cells[1]) + "'");
    }
  }
  return out;
}

json matrix_to_json(const TransitionMatrix& matrix) {
  json probs = json::array();
  for (const auto& row : matrix.dense_probs()) {
    json r = json::array();
    for (const auto p : row) {
      r.push_back(rounded(p, 12));
    }
    probs.push_back(std::move(r));
  }
  json out{{"states", matrix.states()},
           {"counts", matrix.dense_counts()},
           {"probs", probs},
           {"total_transitions", matrix.total_transitions()}};
  if (const auto& edge = matrix.restart_edge()) {
    out["restart"] = json{{"from", matrix.states()[edge->first]},
                          {"to", matrix.states()[edge->second]}};
  }
  return out;
}

TransitionMatrix matrix_from_json(const json& doc) {
  try {
    const bool has_probs = doc.contains("probs");
    const auto& table = has_probs ? doc.at("probs") : doc.at("counts");
    std::vector<std::size_t> states;
    if (doc.contains("states")) {
      states = doc.at("states").get<std::vector<std::size_t>>();
    } else {
      for (std::size_t i = 0; i < table.size(); ++i) {
        states.push_back(i);
      }
    }
    if (has_probs) {
      auto m = TransitionMatrix::from_probabilities(
          std::move(states), table.get<std::vector<std::vector<double>>>());
      if (doc.contains("counts")) {
        m.set_counts(doc.at("counts").get<std::vector<std::vector<std::uint64_t>>>());
      }
      return m;
    }
    return TransitionMatrix::from_counts(
        std::move(states), table.get<std::vector<std::vector<std::uint64_t>>>());
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("matrix: ") + e.what());
  }
}

json ergodicity_to_json(const ErgodicityReport& r) {
  return json{{"irreducible", r.irreducible},
              {"aperiodic", r.aperiodic},
              {"finite", r.finite},
              {"ergodic", r.ergodic},
              {"period", r.period},
              {"closed_classes", r.closed_classes},
              {"communicating_class_of_zero", r.communicating_class_of_zero}};
}

json steady_to_json(const SteadyStateDistribution& nu) {
  json values = json::array();
  for (const auto v : nu.nu) {
    values.push_back(rounded(v));
  }
  json out{{"states", nu.states},
           {"nu", values},
           {"residual_below_1e-10", nu.residual <= 1e-10},
           {"reduced", nu.reduced},
           {"periodic", nu.periodic}};
  if (!nu.warning.empty()) {
    out["warning"] = nu.warning;
  }
  return out;
}

json metrics_to_json(const QueueMetrics& m) {
  return json{{"v0", rounded(m.v0)},
              {"v_full", rounded(m.v_full)},
              {"mean_jobs", rounded(m.mean_jobs)},
              {"utilization", rounded(m.utilization)},
              {"num_states", m.num_states},
              {"num_transitions", m.num_transitions}};
}

std::string metrics_csv_header() {
  return "v0,v_full,mean_jobs,utilization,num_states,num_transitions";
}

std::string metrics_csv_row(const QueueMetrics& m) {
  return fixed(m.v0) + ',' + fixed(m.v_full) + ',' + fixed(m.mean_jobs) + ',' +
         fixed(m.utilization) + ',' + std::to_string(m.num_states) + ',' +
         std::to_string(m.num_transitions);
}

std::string sweep_to_csv(const SweepReport& report) {
  std::string out = "qubits,capacity,depth,stalls,pauses," + metrics_csv_header() + '\n';
  for (const auto& row : report.rows) {
    out += std::to_string(report.qubits) + ',' + row.capacity.to_string() + ',' +
           std::to_string(row.assembly_depth) + ',' +
           std::to_string(row.stall_steps) + ',' +
           std::to_string(row.pause_steps) + ',';
    out += row.metrics ? metrics_csv_row(*row.metrics) : std::string(",,,,,");
    out += '\n';
  }
  return out;
}

json sweep_to_json(const SweepReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r{{"capacity", row.capacity.to_string()},
           {"depth", row.assembly_depth},
           {"stalls", row.stall_steps},
           {"pauses", row.pause_steps},
           {"ergodic", row.ergodic}};
    if (row.metrics) {
      r["metrics"] = metrics_to_json(*row.metrics);
    }
    if (!row.warning.empty()) {
      r["warning"] = row.warning;
    }
    if (!row.error.empty()) {
      r["error"] = row.error;
    }
    rows.push_back(std::move(r));
  }
  return json{{"qubits", report.qubits},
              {"baseline_depth", report.baseline_depth},
              {"optimal_buffer", optimal_buffer(report).to_string()},
              {"rows", rows}};
}

std::string table1_to_csv(std::span<const Table1Row> rows) {
  std::string out =
      "qubits,mean_size7,mean_infinite,states_infinite,utilization,transitions\n";
  for (const auto& r : rows) {
    out += std::to_string(r.qubits) + ',' + fixed(r.mean_jobs_size7) + ',' +
           fixed(r.mean_jobs_infinite) + ',' + std::to_string(r.states_infinite) +
           ',' + fixed(r.utilization) + ',' + std::to_string(r.transitions) + '\n';
  }
  return out;
}

json calibration_to_json(const CalibrationResult& result) {
  json errors = json::array();
  for (const auto& e : result.per_n_errors) {
    errors.push_back(json{{"qubits", e.qubits},
                          {"transitions", rounded(e.transitions)},
                          {"states", rounded(e.states)},
                          {"utilization", rounded(e.utilization)},
                          {"mean_jobs_infinite", rounded(e.mean_jobs_infinite)}});
  }
  json grid = json::array();
  for (const auto& c : result.candidates) {
    grid.push_back(json{{"rate", c.rate.to_string()},
                        {"profile", std::string(to_string(c.shape))},
                        {"objective", rounded(c.objective)}});
  }
  return json{{"best_rate", result.best_rate.to_string()},
              {"best_profile", std::string(to_string(result.best_shape))},
              {"objective", rounded(result.objective)},
              {"per_n_errors", errors},
              {"grid", grid}};
}

std::string calibration_to_csv(const CalibrationResult& result) {
  std::string out = "rate,profile,objective,best\n";
  for (const auto& c : result.candidates) {
    const bool best = c.rate == result.best_rate && c.shape == result.best_shape;
    out += c.rate.to_string() + ',' + std::string(to_string(c.shape)) + ',' +
           fixed(c.objective) + ',' + (best ? "1" : "0") + '\n';
  }
  return out;
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace distillq::io
