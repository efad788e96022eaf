#include "distillq/circuit.hpp"
#include "distillq/emulator.hpp"
#include "distillq/error.hpp"
#include "distillq/io.hpp"
#include "distillq/markov.hpp"
#include "distillq/sweep.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <variant>

namespace py = pybind11;
namespace dq = distillq;

namespace {

dq::Rational to_rational(const py::object& value) {
  if (py::isinstance<py::str>(value)) {
    return dq::Rational::parse(value.cast<std::string>());
  }
  if (py::isinstance<py::tuple>(value)) {
    auto t = value.cast<std::pair<std::int64_t, std::int64_t>>();
    return {t.first, t.second};
  }
  if (py::isinstance<py::int_>(value)) {
    return {value.cast<std::int64_t>(), 1};
  }
  return dq::Rational::parse(py::str(value).cast<std::string>());
}

dq::BufferCapacity to_capacity(const py::object& value) {
  if (value.is_none()) {
    return dq::BufferCapacity::infinite();
  }
  if (py::isinstance<py::str>(value)) {
    return dq::BufferCapacity::parse(value.cast<std::string>());
  }
  const auto b = value.cast<long long>();
  if (b < 0) {
    throw dq::InvalidConfig("buffer capacity must be non-negative");
  }
  return dq::BufferCapacity::finite(static_cast<std::size_t>(b));
}

py::object from_capacity(const dq::BufferCapacity& c) {
  if (c.is_infinite()) {
    return py::none();
  }
  return py::int_(c.value());
}

dq::EmulatorConfig make_config(const py::object& rate, const py::object& buffer,
                               const std::string& policy, std::size_t warmup,
                               std::size_t stock,
                               std::optional<std::size_t> cutoff) {
  dq::EmulatorConfig cfg;
  cfg.production_rate = to_rational(rate);
  cfg.buffer = to_capacity(buffer);
  cfg.policy = dq::parse_policy(policy);
  cfg.warmup_remaining = warmup;
  cfg.initial_stock = stock;
  cfg.production_cutoff = cutoff;
  cfg.validate();
  return cfg;
}

#define DQ_CONFIG_ARGS                                                         \
  py::arg("rate") = "16/63", py::arg("buffer") = py::none(),                   \
  py::arg("policy") = "stop-when-full", py::arg("warmup") = 1,                 \
  py::arg("stock") = 0, py::arg("cutoff") = py::none()

dq::SlotTimeline timeline_of(const py::object& obj) {
  if (py::isinstance<dq::SlotTimeline>(obj)) {
    return obj.cast<dq::SlotTimeline>();
  }
  return dq::sequentialize(obj.cast<dq::Circuit>());
}

py::dict metrics_dict(const dq::QueueMetrics& m) {
  py::dict d;
  d["v0"] = m.v0;
  d["v_full"] = m.v_full;
  d["mean_jobs"] = m.mean_jobs;
  d["utilization"] = m.utilization;
  d["num_states"] = m.num_states;
  d["num_transitions"] = m.num_transitions;
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Magic-state buffer emulation and queueing analysis";
  m.attr("__version__") = DISTILLQ_VERSION;

  auto base = py::register_exception<dq::Error>(m, "Error", PyExc_ValueError);
  py::register_exception<dq::InvalidQubitCount>(m, "InvalidQubitCount", base.ptr());
  py::register_exception<dq::InvalidProfile>(m, "InvalidProfile", base.ptr());
  py::register_exception<dq::InvalidConfig>(m, "InvalidConfig", base.ptr());
  py::register_exception<dq::EmptyCircuit>(m, "EmptyCircuit", base.ptr());
  auto line = py::register_exception<dq::LineError>(m, "LineError", base.ptr());
  py::register_exception<dq::UnknownGate>(m, "UnknownGate", line.ptr());
  py::register_exception<dq::MalformedLine>(m, "MalformedLine", line.ptr());
  py::register_exception<dq::InsufficientTrace>(m, "InsufficientTrace", base.ptr());
  py::register_exception<dq::NonUniqueSteadyState>(m, "NonUniqueSteadyState",
                                                    base.ptr());
  py::register_exception<dq::EmptyGrid>(m, "EmptyGrid", base.ptr());

  py::class_<dq::Circuit>(m, "Circuit")
      .def_readonly("n_qubits", &dq::Circuit::n_qubits)
      .def_readonly("label", &dq::Circuit::label)
      .def_property_readonly("t_count", &dq::Circuit::t_count)
      .def("__len__", [](const dq::Circuit& c) { return c.gates.size(); })
      .def("gates",
           [](const dq::Circuit& c) {
             py::list out;
             for (const auto& g : c.gates) {
               out.append(py::make_tuple(std::string(dq::mnemonic(g.kind)),
                                         g.targets));
             }
             return out;
           })
      .def("__eq__", [](const dq::Circuit& a, const dq::Circuit& b) { return a == b; })
      .def("__repr__", [](const dq::Circuit& c) {
        return "<Circuit " + c.label + " qubits=" + std::to_string(c.n_qubits) +
               " gates=" + std::to_string(c.gates.size()) + ">";
      });

  py::class_<dq::SlotTimeline>(m, "SlotTimeline")
      .def_readonly("source", &dq::SlotTimeline::source)
      .def("__len__", &dq::SlotTimeline::size)
      .def_property_readonly("t_count", &dq::SlotTimeline::t_count)
      .def("t_positions", [](const dq::SlotTimeline& tl) {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < tl.slots.size(); ++i) {
          if (tl.slots[i] == dq::Slot::T) {
            out.push_back(i);
          }
        }
        return out;
      });

  m.def(
      "generate_adder",
      [](std::size_t n, const std::string& shape, bool extra_stage) {
        auto profile = dq::AdderProfile::defaults(dq::parse_adder_shape(shape));
        profile.extra_stage = extra_stage;
        return dq::generate_adder(n, profile);
      },
      py::arg("n"), py::arg("shape") = "uniform", py::arg("extra_stage") = false);
  m.def(
      "parse_circuit",
      [](const std::string& text, std::string label) {
        return dq::parse_circuit(text, std::move(label));
      },
      py::arg("text"), py::arg("label") = "");
  m.def("serialize", &dq::serialize_circuit, py::arg("circuit"));
  m.def("sequentialize", &dq::sequentialize, py::arg("circuit"));
  m.def(
      "circuit_stats",
      [](const dq::Circuit& c) {
        const auto s = dq::circuit_stats(c);
        py::dict d;
        d["t_count"] = s.t_count;
        d["clifford_count"] = s.clifford_count;
        d["slot_count"] = s.slot_count;
        d["sequential_t_depth"] = s.sequential_t_depth;
        return d;
      },
      py::arg("circuit"));

  py::class_<dq::EmulationTrace>(m, "EmulationTrace")
      .def_readonly("occupancy", &dq::EmulationTrace::occupancy)
      .def_readonly("stall_steps", &dq::EmulationTrace::stall_steps)
      .def_readonly("pause_steps", &dq::EmulationTrace::pause_steps)
      .def_readonly("produced", &dq::EmulationTrace::produced)
      .def_readonly("consumed", &dq::EmulationTrace::consumed)
      .def_readonly("assembly_depth", &dq::EmulationTrace::assembly_depth)
      .def_readonly("t_slots", &dq::EmulationTrace::t_slots)
      .def_readonly("held_at_end", &dq::EmulationTrace::held_at_end)
      .def_readonly("completed", &dq::EmulationTrace::completed)
      .def("events", [](const dq::EmulationTrace& t) {
        std::vector<std::string> out;
        out.reserve(t.events.size());
        for (auto e : t.events) {
          out.push_back(dq::format_events(e));
        }
        return out;
      })
      .def("to_csv", &dq::io::trace_to_csv);

  m.def(
      "emulate",
      [](const py::object& circuit, const py::object& rate, const py::object& buffer,
         const std::string& policy, std::size_t warmup, std::size_t stock,
         std::optional<std::size_t> cutoff) {
        return dq::emulate(timeline_of(circuit),
                           make_config(rate, buffer, policy, warmup, stock, cutoff));
      },
      py::arg("circuit"), DQ_CONFIG_ARGS);

  m.def(
      "shutdown_time",
      [](const py::object& circuit, const py::object& rate, const py::object& buffer,
         const std::string& policy, std::size_t warmup, std::size_t stock,
         std::optional<std::size_t> cutoff) {
        const auto r = dq::shutdown_time(
            timeline_of(circuit),
            make_config(rate, buffer, policy, warmup, stock, cutoff));
        py::dict d;
        d["shutdown_step"] = r.shutdown_step;
        d["verified"] = r.verified;
        d["depth"] = r.depth;
        d["depth_with_shutdown"] = r.depth_with_shutdown;
        return d;
      },
      py::arg("circuit"), DQ_CONFIG_ARGS);

  py::class_<dq::TransitionMatrix>(m, "TransitionMatrix")
      .def_property_readonly("states", &dq::TransitionMatrix::states)
      .def("__len__", &dq::TransitionMatrix::size)
      .def_property_readonly("total_transitions",
                             &dq::TransitionMatrix::total_transitions)
      .def("prob", &dq::TransitionMatrix::prob)
      .def("count", &dq::TransitionMatrix::count)
      .def("dense_probs", &dq::TransitionMatrix::dense_probs)
      .def("dense_counts", &dq::TransitionMatrix::dense_counts)
      .def_static(
          "from_probabilities",
          [](const std::vector<std::vector<double>>& probs,
             std::optional<std::vector<std::size_t>> states) {
            std::vector<std::size_t> s;
            if (states) {
              s = *states;
            } else {
              for (std::size_t i = 0; i < probs.size(); ++i) {
                s.push_back(i);
              }
            }
            return dq::TransitionMatrix::from_probabilities(std::move(s), probs);
          },
          py::arg("probs"), py::arg("states") = py::none());

  m.def(
      "build_chain",
      [](const py::object& source, bool restart) {
        const auto closure = restart ? dq::Closure::Restart : dq::Closure::None;
        if (py::isinstance<dq::EmulationTrace>(source)) {
          return dq::build_chain(source.cast<dq::EmulationTrace>(), closure);
        }
        const auto occ = source.cast<std::vector<std::size_t>>();
        return dq::build_chain(occ, closure);
      },
      py::arg("trace"), py::arg("restart") = true);

  m.def(
      "check_ergodic",
      [](const dq::TransitionMatrix& mat) {
        const auto r = dq::check_ergodic(mat);
        py::dict d;
        d["irreducible"] = r.irreducible;
        d["aperiodic"] = r.aperiodic;
        d["finite"] = r.finite;
        d["ergodic"] = r.ergodic;
        d["period"] = r.period;
        d["closed_classes"] = r.closed_classes;
        d["communicating_class_of_zero"] = r.communicating_class_of_zero;
        return d;
      },
      py::arg("matrix"));

  py::class_<dq::SteadyStateDistribution>(m, "SteadyStateDistribution")
      .def_readonly("states", &dq::SteadyStateDistribution::states)
      .def_readonly("nu", &dq::SteadyStateDistribution::nu)
      .def_readonly("residual", &dq::SteadyStateDistribution::residual)
      .def_readonly("reduced", &dq::SteadyStateDistribution::reduced)
      .def_readonly("periodic", &dq::SteadyStateDistribution::periodic)
      .def_readonly("warning", &dq::SteadyStateDistribution::warning);

  m.def("steady_state", &dq::steady_state, py::arg("matrix"));
  m.def(
      "queue_metrics",
      [](const dq::SteadyStateDistribution& nu, const dq::TransitionMatrix& mat) {
        return metrics_dict(dq::queue_metrics(nu, mat));
      },
      py::arg("nu"), py::arg("matrix"));

  m.def(
      "sweep_buffers",
      [](const dq::Circuit& circuit, const py::list& capacities,
         const py::object& rate, const std::string& policy, std::size_t warmup,
         std::size_t stock) {
        dq::SweepConfig cfg;
        cfg.base = make_config(rate, py::none(), policy, warmup, stock, std::nullopt);
        for (const auto& c : capacities) {
          cfg.capacities.push_back(to_capacity(py::reinterpret_borrow<py::object>(c)));
        }
        const auto report = dq::sweep_buffers(circuit, cfg);
        py::list rows;
        for (const auto& r : report.rows) {
          py::dict d;
          d["capacity"] = from_capacity(r.capacity);
          d["depth"] = r.assembly_depth;
          d["stalls"] = r.stall_steps;
          d["pauses"] = r.pause_steps;
          d["metrics"] = r.metrics ? py::object(metrics_dict(*r.metrics)) : py::none();
          d["ergodic"] = r.ergodic;
          d["warning"] = r.warning;
          d["error"] = r.error;
          rows.append(d);
        }
        py::dict out;
        out["qubits"] = report.qubits;
        out["baseline_depth"] = report.baseline_depth;
        out["rows"] = rows;
        out["optimal_buffer"] = from_capacity(dq::optimal_buffer(report));
        return out;
      },
      py::arg("circuit"), py::arg("capacities"), py::arg("rate") = "16/63",
      py::arg("policy") = "stop-when-full", py::arg("warmup") = 1,
      py::arg("stock") = 0);

  auto row_dict = [](const dq::ReferenceRow& r) {
    py::dict d;
    d["qubits"] = r.qubits;
    d["mean_size7"] = r.mean_jobs_size7;
    d["mean_infinite"] = r.mean_jobs_infinite;
    d["states_infinite"] = r.states_infinite;
    d["utilization"] = r.utilization;
    d["transitions"] = r.transitions;
    return d;
  };

  m.def("reference_table", [row_dict] {
    py::list out;
    for (const auto& r : dq::reference_table()) {
      out.append(row_dict(r));
    }
    return out;
  });

  m.def(
      "table1_row",
      [row_dict](std::size_t n, const std::string& shape, const py::object& rate) {
        dq::EmulatorConfig base;
        base.production_rate = to_rational(rate);
        return row_dict(
            dq::table1_row(n, dq::AdderProfile::defaults(dq::parse_adder_shape(shape)),
                           base));
      },
      py::arg("n"), py::arg("shape") = "uniform", py::arg("rate") = "16/63");

  m.def(
      "calibrate",
      [](std::optional<std::vector<std::string>> rates,
         std::vector<std::string> shapes, std::optional<std::vector<std::size_t>> ns) {
        std::vector<dq::Rational> grid;
        if (rates) {
          for (const auto& r : *rates) {
            grid.push_back(dq::Rational::parse(r));
          }
        } else {
          grid = dq::default_rate_grid();
        }
        std::vector<dq::AdderShape> sh;
        for (const auto& s : shapes) {
          sh.push_back(dq::parse_adder_shape(s));
        }
        std::vector<std::size_t> sizes;
        if (ns) {
          sizes = *ns;
        } else {
          for (const auto& r : dq::reference_table()) {
            sizes.push_back(r.qubits);
          }
        }
        dq::CalibrationResult result;
        {
          py::gil_scoped_release release;
          result = dq::calibrate(dq::reference_table(), grid, sh, sizes);
        }
        py::dict d;
        d["best_rate"] = result.best_rate.to_string();
        d["best_shape"] = std::string(dq::to_string(result.best_shape));
        d["objective"] = result.objective;
        py::list cands;
        for (const auto& c : result.candidates) {
          cands.append(py::make_tuple(c.rate.to_string(),
                                      std::string(dq::to_string(c.shape)),
                                      c.objective));
        }
        d["candidates"] = cands;
        return d;
      },
      py::arg("rates") = py::none(),
      py::arg("shapes") = std::vector<std::string>{"uniform", "burst", "tapered"},
      py::arg("ns") = py::none());
}
