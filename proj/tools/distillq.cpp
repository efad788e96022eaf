// distillq: command-line front end for adder generation, distillery
// emulation, DTMC analysis, buffer sweeps and calibration.
//
// Exit status: 0 success, 2 input/parse/config error, 3 non-ergodic chain
// under --strict-ergodic. DISTILLQ_SEED is reserved and ignored: every stage
// is deterministic.

#include "distillq/circuit.hpp"
#include "distillq/emulator.hpp"
#include "distillq/error.hpp"
#include "distillq/io.hpp"
#include "distillq/markov.hpp"
#include "distillq/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using distillq::io::json;
namespace dq = distillq;

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kNotErgodic = 3;

class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot read '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

struct Options {
  std::string rate;
  std::string policy;
  std::string config_path;
  std::size_t warmup = 0;
  std::size_t stock = 0;
  std::string buffers;
  std::string out;
  std::string format;
  bool strict_ergodic = false;
  std::string circuit_path;
  std::string profile = "uniform";
  bool extra_stage = false;
  std::size_t qubits = 0;
  std::string matrix_path;
  std::string trace_path;
  std::string rates;
  std::string profiles = "uniform,burst,tapered";
  std::string ns;
  bool reference = false;
  bool calibrated = false;

  CLI::Option* warmup_opt = nullptr;
  CLI::Option* stock_opt = nullptr;
};

void add_config_flags(CLI::App* app, Options& o) {
  app->add_option("--rate", o.rate, "Production rate p/q (states per slot)");
  app->add_option("--policy", o.policy, "stop-when-full | lookahead:<w>");
  o.warmup_opt = app->add_option("--warmup", o.warmup,
                                 "Steps until the first state is ready");
  o.stock_opt = app->add_option("--stock", o.stock, "Initially buffered states");
  app->add_option("--config", o.config_path,
                  "JSON config; explicit flags take precedence");
}

void add_output_flags(CLI::App* app, Options& o, const std::string& fallback) {
  app->add_option("-o,--out", o.out, "Output file (default: stdout)");
  app->add_option("--format", o.format, "csv | json (default: " + fallback + ")")
      ->check(CLI::IsMember({"csv", "json"}));
}

bool wants_json(const Options& o, bool json_by_default) {
  return o.format.empty() ? json_by_default : o.format == "json";
}

dq::EmulatorConfig effective_config(const Options& o) {
  dq::EmulatorConfig cfg;
  if (!o.config_path.empty()) {
    cfg = dq::io::config_from_json(read_json(o.config_path), cfg);
  }
  if (!o.rate.empty()) {
    cfg.production_rate = dq::Rational::parse(o.rate);
  }
  if (!o.policy.empty()) {
    cfg.policy = dq::parse_policy(o.policy);
  }
  if (o.warmup_opt != nullptr && o.warmup_opt->count() > 0) {
    cfg.warmup_remaining = o.warmup;
  }
  if (o.stock_opt != nullptr && o.stock_opt->count() > 0) {
    cfg.initial_stock = o.stock;
  }
  return cfg;
}

dq::BufferCapacity single_buffer(const Options& o, dq::BufferCapacity fallback) {
  if (o.buffers.empty()) {
    return fallback;
  }
  const auto list = dq::io::parse_buffer_list(o.buffers);
  if (list.size() != 1) {
    throw dq::InvalidConfig("this command takes a single --buffer value");
  }
  return list.front();
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes the payload and, for file outputs, a manifest beside it.
void emit(const Options& o, const std::string& command, const json& effective,
          const std::vector<std::string>& inputs, const std::string& payload) {
  if (o.out.empty()) {
    std::cout << payload;
    return;
  }
  {
    std::ofstream out(o.out, std::ios::binary);
    if (!out) {
      throw InputError("cannot write '" + o.out + "'");
    }
    out << payload;
  }
  const json manifest{
      {"command", command},
      {"config_digest", "fnv1a64:" + dq::io::fnv1a64_hex(effective.dump())},
      {"effective_config", effective},
      {"inputs", inputs},
      {"outputs", json::array({o.out})},
      {"tool_version", DISTILLQ_VERSION},
      {"created", utc_now()}};
  std::ofstream man(o.out + ".manifest.json", std::ios::binary);
  man << manifest.dump(2) << '\n';
}

dq::Circuit load_circuit(const std::string& path) {
  auto c = dq::parse_circuit(read_file(path), path);
  c.validate();
  return c;
}

int run_gen_adder(const Options& o) {
  auto profile = dq::AdderProfile::defaults(dq::parse_adder_shape(o.profile));
  profile.extra_stage = o.extra_stage;
  const auto circuit = dq::generate_adder(o.qubits, profile);
  const json effective{{"qubits", o.qubits},
                       {"profile", o.profile},
                       {"extra_stage", o.extra_stage}};
  emit(o, "gen-adder", effective, {}, dq::serialize_circuit(circuit));
  return kOk;
}

int run_emulate(const Options& o) {
  auto cfg = effective_config(o);
  cfg.buffer = single_buffer(o, cfg.buffer);
  const auto circuit = load_circuit(o.circuit_path);
  const auto trace = dq::emulate(dq::sequentialize(circuit), cfg);
  const auto payload = wants_json(o, false) ? dq::io::trace_to_json(trace).dump(2) + "\n"
                                          : dq::io::trace_to_csv(trace);
  emit(o, "emulate", dq::io::config_to_json(cfg), {o.circuit_path}, payload);
  return kOk;
}

std::string edge_list_csv(const dq::TransitionMatrix& m) {
  std::string out = "from,to,count,prob\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (const auto& e : m.row(i)) {
      out += std::to_string(m.states()[i]) + ',' + std::to_string(m.states()[e.col]) +
             ',' + std::to_string(e.count) + ',' + dq::io::fixed(e.prob) + '\n';
    }
  }
  return out;
}

int run_chain(const Options& o) {
  auto cfg = effective_config(o);
  cfg.buffer = single_buffer(o, cfg.buffer);
  std::vector<std::size_t> occupancy;
  std::vector<std::string> inputs;
  if (!o.trace_path.empty()) {
    occupancy = dq::io::occupancy_from_csv(read_file(o.trace_path));
    inputs.push_back(o.trace_path);
  } else {
    const auto circuit = load_circuit(o.circuit_path);
    occupancy = dq::emulate(dq::sequentialize(circuit), cfg).occupancy;
    inputs.push_back(o.circuit_path);
  }
  const auto m = dq::build_chain(std::span<const std::size_t>(occupancy));
  const auto payload = wants_json(o, true) ? dq::io::matrix_to_json(m).dump() + "\n"
                                          : edge_list_csv(m);
  emit(o, "chain", dq::io::config_to_json(cfg), inputs, payload);
  return kOk;
}

int run_steady(const Options& o) {
  auto cfg = effective_config(o);
  cfg.buffer = single_buffer(o, cfg.buffer);
  dq::TransitionMatrix m;
  std::vector<std::string> inputs;
  if (!o.matrix_path.empty()) {
    m = dq::io::matrix_from_json(read_json(o.matrix_path));
    inputs.push_back(o.matrix_path);
  } else {
    const auto circuit = load_circuit(o.circuit_path);
    m = dq::build_chain(dq::emulate(dq::sequentialize(circuit), cfg));
    inputs.push_back(o.circuit_path);
  }
  const auto erg = dq::check_ergodic(m);
  if (o.strict_ergodic && !erg.ergodic) {
    std::cerr << "error: chain is not ergodic\n";
    return kNotErgodic;
  }
  const auto nu = dq::steady_state(m);
  const auto metrics = dq::queue_metrics(nu, m);
  std::string payload;
  if (wants_json(o, true)) {
    auto doc = dq::io::steady_to_json(nu);
    doc["ergodicity"] = dq::io::ergodicity_to_json(erg);
    doc["metrics"] = dq::io::metrics_to_json(metrics);
    payload = doc.dump(2) + "\n";
  } else {
    payload = dq::io::metrics_csv_header() + "\n" + dq::io::metrics_csv_row(metrics) + "\n";
  }
  emit(o, "steady", dq::io::config_to_json(cfg), inputs, payload);
  return kOk;
}

int run_sweep(const Options& o) {
  dq::SweepConfig sc;
  sc.base = effective_config(o);
  sc.capacities = dq::io::parse_buffer_list(o.buffers.empty() ? "0..8,inf" : o.buffers);
  const auto circuit = load_circuit(o.circuit_path);
  const auto report = dq::sweep_buffers(circuit, sc);
  const auto payload = wants_json(o, false) ? dq::io::sweep_to_json(report).dump(2) + "\n"
                                          : dq::io::sweep_to_csv(report);
  auto effective = dq::io::config_to_json(sc.base);
  effective["buffers"] = o.buffers.empty() ? "0..8,inf" : o.buffers;
  emit(o, "sweep", effective, {o.circuit_path}, payload);
  std::cerr << "optimal buffer: " << dq::optimal_buffer(report).to_string()
            << " (baseline depth " << report.baseline_depth << ")\n";
  if (o.strict_ergodic) {
    for (const auto& row : report.rows) {
      if (!row.ergodic) {
        std::cerr << "error: chain for capacity " << row.capacity.to_string()
                  << " is not ergodic\n";
        return kNotErgodic;
      }
    }
  }
  return kOk;
}

std::vector<dq::Rational> parse_rates(const std::string& text) {
  if (text.empty()) {
    return dq::default_rate_grid();
  }
  std::vector<dq::Rational> rates;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    rates.push_back(dq::Rational::parse(item));
  }
  return rates;
}

std::vector<dq::AdderShape> parse_shapes(const std::string& text) {
  std::vector<dq::AdderShape> shapes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    shapes.push_back(dq::parse_adder_shape(item));
  }
  return shapes;
}

std::vector<std::size_t> reference_sizes() {
  std::vector<std::size_t> ns;
  for (const auto& r : dq::reference_table()) {
    ns.push_back(r.qubits);
  }
  return ns;
}

dq::CalibrationResult calibrate_with(const Options& o, const dq::EmulatorConfig& base) {
  const auto rates = parse_rates(o.rates);
  const auto shapes = parse_shapes(o.profiles);
  const auto ns = o.ns.empty() ? reference_sizes() : dq::io::parse_size_list(o.ns);
  return dq::calibrate(dq::reference_table(), rates, shapes, ns, base);
}

int run_calibrate(const Options& o) {
  const auto base = effective_config(o);
  const auto result = calibrate_with(o, base);
  const auto payload = wants_json(o, true)
                           ? dq::io::calibration_to_json(result).dump(2) + "\n"
                           : dq::io::calibration_to_csv(result);
  auto effective = dq::io::config_to_json(base);
  effective["rates"] = o.rates;
  effective["profiles"] = o.profiles;
  effective["ns"] = o.ns;
  emit(o, "calibrate", effective, {}, payload);
  return kOk;
}

int run_table1(const Options& o) {
  auto cfg = effective_config(o);
  auto effective = dq::io::config_to_json(cfg);
  std::vector<dq::Table1Row> rows;
  if (o.reference) {
    rows = dq::reference_table();
    effective = json{{"reference", true}};
  } else {
    auto profile = dq::AdderProfile::defaults(dq::parse_adder_shape(o.profile));
    if (o.calibrated) {
      const auto best = calibrate_with(o, cfg);
      cfg.production_rate = best.best_rate;
      profile = best.best_profile;
      std::cerr << "calibrated: " << to_string(best.best_shape) << " @ "
                << best.best_rate.to_string() << '\n';
    }
    const auto ns = o.ns.empty() ? reference_sizes() : dq::io::parse_size_list(o.ns);
    for (const auto n : ns) {
      rows.push_back(dq::table1_row(n, profile, cfg));
    }
    effective = dq::io::config_to_json(cfg);
    effective["profile"] = std::string(to_string(profile.shape));
    effective["ns"] = o.ns;
  }
  std::string payload;
  if (wants_json(o, false)) {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back(json{{"qubits", r.qubits},
                         {"mean_size7", dq::io::rounded(r.mean_jobs_size7)},
                         {"mean_infinite", dq::io::rounded(r.mean_jobs_infinite)},
                         {"states_infinite", r.states_infinite},
                         {"utilization", dq::io::rounded(r.utilization)},
                         {"transitions", r.transitions}});
    }
    payload = arr.dump(2) + "\n";
  } else {
    payload = dq::io::table1_to_csv(rows);
  }
  emit(o, "table1", effective, {}, payload);
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"distillq: T-state distillery/buffer emulator and DTMC analyzer"};
  app.set_version_flag("--version", DISTILLQ_VERSION);
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen-adder", "Write a carry-ripple adder gate list");
  gen->add_option("-n,--qubits", o.qubits, "Adder width (>= 2)")->required();
  gen->add_option("--profile", o.profile, "uniform | burst | tapered");
  gen->add_flag("--extra-stage", o.extra_stage, "Add an n-th stage (4n T gates)");
  gen->add_option("-o,--out", o.out, "Output .ctq file (default: stdout)");

  auto* emu = app.add_subcommand("emulate", "Emulate one run and export the trace");
  emu->add_option("-c,--circuit", o.circuit_path, "Gate list (.ctq)")->required();
  emu->add_option("-b,--buffer", o.buffers, "Buffer capacity (integer or inf)");
  add_config_flags(emu, o);
  add_output_flags(emu, o, "csv");

  auto* chain = app.add_subcommand("chain", "Build the transition matrix of a run");
  auto* chain_c = chain->add_option("-c,--circuit", o.circuit_path, "Gate list (.ctq)");
  auto* chain_t = chain->add_option("--trace", o.trace_path, "Trace CSV from 'emulate'");
  chain_c->excludes(chain_t);
  chain->add_option("-b,--buffer", o.buffers, "Buffer capacity (integer or inf)");
  add_config_flags(chain, o);
  add_output_flags(chain, o, "json");

  auto* steady = app.add_subcommand("steady", "Solve the steady state and queue metrics");
  auto* steady_m = steady->add_option("--matrix", o.matrix_path, "Matrix JSON");
  auto* steady_c = steady->add_option("-c,--circuit", o.circuit_path, "Gate list (.ctq)");
  steady_m->excludes(steady_c);
  steady->add_option("-b,--buffer", o.buffers, "Buffer capacity (integer or inf)");
  steady->add_flag("--strict-ergodic", o.strict_ergodic, "Exit 3 if not ergodic");
  add_config_flags(steady, o);
  add_output_flags(steady, o, "json");

  auto* sweep = app.add_subcommand("sweep", "Sweep buffer capacities");
  sweep->add_option("-c,--circuit", o.circuit_path, "Gate list (.ctq)")->required();
  sweep->add_option("--buffers", o.buffers, "Capacities, e.g. 0..8,inf");
  sweep->add_flag("--strict-ergodic", o.strict_ergodic, "Exit 3 if any row is not ergodic");
  add_config_flags(sweep, o);
  add_output_flags(sweep, o, "csv");

  auto* cal = app.add_subcommand("calibrate", "Grid-search rate and profile against the reference table");
  cal->add_option("--rates", o.rates, "Comma-separated rates (default grid if omitted)");
  cal->add_option("--profiles", o.profiles, "Comma-separated profiles");
  cal->add_option("--ns", o.ns, "Comma-separated adder widths (default: all reference rows)");
  add_config_flags(cal, o);
  add_output_flags(cal, o, "json");

  auto* t1 = app.add_subcommand("table1", "Emit results in the reference column schema");
  t1->add_option("--profile", o.profile, "uniform | burst | tapered");
  t1->add_option("--ns", o.ns, "Comma-separated adder widths (default: all reference rows)");
  t1->add_flag("--reference", o.reference, "Print the embedded reference table instead");
  t1->add_flag("--calibrated", o.calibrated, "Use the best-fit rate and profile from calibrate");
  t1->add_option("--rates", o.rates, "Calibration rates (with --calibrated)");
  t1->add_option("--profiles", o.profiles, "Calibration profiles (with --calibrated)");
  add_config_flags(t1, o);
  add_output_flags(t1, o, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*gen) {
      return run_gen_adder(o);
    }
    if (*emu) {
      return run_emulate(o);
    }
    if (*chain) {
      if (o.circuit_path.empty() && o.trace_path.empty()) {
        throw InputError("chain needs --circuit or --trace");
      }
      return run_chain(o);
    }
    if (*steady) {
      if (o.circuit_path.empty() && o.matrix_path.empty()) {
        throw InputError("steady needs --matrix or --circuit");
      }
      return run_steady(o);
    }
    if (*sweep) {
      return run_sweep(o);
    }
    if (*cal) {
      return run_calibrate(o);
    }
    if (*t1) {
      return run_table1(o);
    }
  } catch (const dq::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
