// Acceptance suite: one PASS/FAIL line per criterion, each with its runtime
// budget. Exit status is the number of failed criteria.
#include "distillq/circuit.hpp"
#include "distillq/emulator.hpp"
#include "distillq/io.hpp"
#include "distillq/markov.hpp"
#include "distillq/sweep.hpp"

#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace distillq;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s,
               const std::function<Outcome()>& body, double extra_s = 0.0) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() + extra_s;
  const bool in_time = secs < budget_s;
  const bool pass = out.ok && in_time;
  if (!pass) {
    ++failures;
  }
  std::printf("[%s] %2d %-28s %.3fs (< %.0fs) %s%s\n", pass ? "PASS" : "FAIL", id, title,
              secs, budget_s, out.detail.c_str(), in_time ? "" : " [over budget]");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<BufferCapacity> zero_to_eight_inf() {
  return io::parse_buffer_list("0..8,inf");
}

const std::vector<std::size_t> kAllNs{16, 32, 64, 128, 256, 512, 1024, 1536, 2048};

} // namespace

int main() {
  const auto uniform = AdderProfile::defaults(AdderShape::Uniform);

  criterion(1, "transition counts", 1.0, [&] {
    const std::vector<std::size_t> ns{16, 32, 64, 128, 256};
    const std::vector<std::size_t> want{270, 558, 1134, 2286, 4590};
    Outcome o;
    std::string got;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const auto row = table1_row(ns[i], uniform);
      got += (i ? "," : "") + std::to_string(row.transitions);
      o.ok = o.ok && row.transitions == want[i];
    }
    o.detail = "transitions " + got;
    return o;
  });

  criterion(2, "state counts (inf buffer)", 5.0, [&] {
    const std::vector<std::size_t> want{9, 19, 37, 73, 147, 293, 585, 878, 1171};
    Outcome o;
    std::string got;
    for (std::size_t i = 0; i < kAllNs.size(); ++i) {
      EmulatorConfig cfg;
      const auto tr = emulate(sequentialize(generate_adder(kAllNs[i], uniform)), cfg);
      const auto states = build_chain(tr).size();
      const long tol = kAllNs[i] <= 256 ? 2 : 4;
      o.ok = o.ok && std::labs(static_cast<long>(states) - static_cast<long>(want[i])) <= tol;
      got += (i ? "," : "") + std::to_string(states);
    }
    o.detail = "states " + got;
    return o;
  });

  criterion(3, "depth invariance", 2.0, [&] {
    Outcome o;
    for (std::size_t n : {16, 64, 256}) {
      SweepConfig cfg;
      cfg.capacities = zero_to_eight_inf();
      const auto report = sweep_buffers(generate_adder(n, uniform), cfg);
      for (const auto& row : report.rows) {
        o.ok = o.ok && row.assembly_depth == 18 * (n - 1) && row.stall_steps == 0;
      }
      o.ok = o.ok && report.rows.size() == 10;
    }
    o.detail = "depth 18(n-1), 0 stalls for b in 0..8,inf; n=16,64,256";
    return o;
  });

  criterion(4, "buffer-full probability", 1.0, [&] {
    EmulatorConfig cfg;
    cfg.buffer = BufferCapacity::finite(7);
    const auto a = analyze(sequentialize(generate_adder(16, uniform)), cfg);
    return Outcome{a.metrics.v_full <= 0.05, fmt("v_full %.6f <= 0.05", a.metrics.v_full)};
  });

  // Criteria 5 and 6 run on the calibrated profile; the calibration time is
  // charged to both.
  const auto c0 = std::chrono::steady_clock::now();
  std::vector<Rational> grid = default_rate_grid();
  const std::vector<AdderShape> shapes{AdderShape::Uniform, AdderShape::Burst,
                                       AdderShape::Tapered};
  const auto calib = calibrate(reference_table(), grid, shapes, kAllNs);
  EmulatorConfig fitted;
  fitted.production_rate = calib.best_rate;
  std::vector<Table1Row> rows;
  for (auto n : kAllNs) {
    rows.push_back(table1_row(n, calib.best_profile, fitted));
  }
  const double setup_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - c0).count();
  std::printf("       calibrated profile: %s @ %s (objective %.4f, %.3fs)\n",
              std::string(to_string(calib.best_shape)).c_str(),
              calib.best_rate.to_string().c_str(), calib.objective, setup_s);

  criterion(5, "utilization trend", 30.0, [&] {
    Outcome o;
    std::string got;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double u = rows[i].utilization;
      o.ok = o.ok && u >= 0.60 && u <= 0.85;
      if (i > 0) {
        o.ok = o.ok && u >= rows[i - 1].utilization - 0.02;
      }
      got += (i ? "," : "") + fmt("%.3f", u);
    }
    o.detail = "U " + got;
    return o;
  }, setup_s);

  criterion(6, "mean-jobs shape", 30.0, [&] {
    Outcome o;
    const auto& r1024 = rows[6];
    const auto& r2048 = rows[8];
    const double d7 = std::abs(r2048.mean_jobs_size7 - r1024.mean_jobs_size7);
    o.ok = d7 <= 0.3 && r1024.mean_jobs_size7 <= 8.0 && r2048.mean_jobs_size7 <= 8.0;
    std::string ratios;
    // Pairs (n, 2n) with n >= 256 among the reference sizes.
    const std::vector<std::pair<std::size_t, std::size_t>> pairs{{4, 5}, {5, 6}, {6, 8}};
    for (const auto& [a, b] : pairs) {
      const double ratio = rows[b].mean_jobs_infinite / rows[a].mean_jobs_infinite;
      o.ok = o.ok && ratio >= 1.8 && ratio <= 2.2;
      ratios += fmt(" %.3f", ratio);
    }
    o.detail = fmt("size7 %.3f", r1024.mean_jobs_size7) + fmt("->%.3f", r2048.mean_jobs_size7) +
               "; inf ratios" + ratios;
    return o;
  }, setup_s);

  criterion(7, "depth vs T-count", 1.0, [&] {
    Outcome o;
    std::size_t checked = 0;
    for (auto shape : shapes) {
      for (bool extra : {false, true}) {
        for (auto n : kAllNs) {
          auto p = AdderProfile::defaults(shape);
          p.extra_stage = extra;
          const auto c = generate_adder(n, p);
          const auto tr = emulate(sequentialize(c), EmulatorConfig{});
          o.ok = o.ok && tr.assembly_depth > c.t_count();
          if (shape != AdderShape::Burst && !extra) {
            o.ok = o.ok && tr.assembly_depth == 18 * (n - 1);
          }
          ++checked;
        }
      }
    }
    o.detail = std::to_string(checked) + " adders, depth > t_count";
    return o;
  });

  criterion(8, "solver vs power iteration", 10.0, [&] {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<std::size_t> size(1, 12);
    double worst_diff = 0.0;
    double worst_res = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto p = oracle::random_ergodic(rng, size(rng));
      const auto m = TransitionMatrix::from_probabilities(oracle::iota_states(p.size()), p);
      const auto nu = steady_state(m).nu;
      const auto pi = oracle::power_iteration(p);
      for (std::size_t k = 0; k < nu.size(); ++k) {
        worst_diff = std::max(worst_diff, std::abs(nu[k] - pi[k]));
      }
      worst_res = std::max(worst_res, oracle::balance_residual(p, nu));
    }
    return Outcome{worst_diff <= 1e-8 && worst_res <= 1e-10,
                   fmt("1000 chains, max |nu-pi| %.2e", worst_diff) +
                       fmt(", max residual %.2e", worst_res)};
  });

  criterion(9, "detailed balance", 2.0, [&] {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::size_t> size(2, 40);
    std::uniform_real_distribution<double> prob(0.05, 0.5);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto n = size(rng);
      const double up = prob(rng);
      const double down = prob(rng);
      const auto m = TransitionMatrix::from_probabilities(oracle::iota_states(n),
                                                          oracle::birth_death(n, up, down));
      const auto nu = steady_state(m).nu;
      const auto ref = oracle::birth_death_closed_form(n, up, down);
      for (std::size_t k = 0; k < n; ++k) {
        worst = std::max(worst, std::abs(nu[k] - ref[k]));
      }
    }
    return Outcome{worst <= 1e-10, fmt("100 chains, max error %.2e", worst)};
  });

  criterion(10, "emulator conservation", 30.0, [&] {
    std::mt19937_64 rng(10);
    Outcome o;
    std::size_t bad = 0;
    const int cases = 10000;
    for (int i = 0; i < cases; ++i) {
      const auto tl = oracle::random_timeline(rng, 200);
      const auto cfg = oracle::random_config(rng);
      const auto tr = emulate(tl, cfg);
      bool ok = tr.completed && tr.consumed == tl.t_count() &&
                tr.produced + cfg.initial_stock ==
                    tr.consumed + tr.occupancy.back() + (tr.held_at_end ? 1U : 0U);
      for (std::size_t k = 1; ok && k < tr.occupancy.size(); ++k) {
        const auto a = static_cast<long>(tr.occupancy[k - 1]);
        const auto b = static_cast<long>(tr.occupancy[k]);
        ok = std::labs(a - b) <= 1 &&
             (cfg.buffer.is_infinite() || tr.occupancy[k] <= cfg.buffer.system_limit());
      }
      bad += ok ? 0 : 1;
    }
    o.ok = bad == 0;
    o.detail = std::to_string(cases) + " cases, " + std::to_string(bad) + " violations";
    return o;
  });

  criterion(11, "depth monotonicity", 30.0, [&] {
    std::mt19937_64 rng(11);
    std::size_t bad = 0;
    const int cases = 1000;
    for (int i = 0; i < cases; ++i) {
      SweepConfig cfg;
      cfg.capacities = zero_to_eight_inf();
      cfg.base = oracle::random_config(rng);
      cfg.base.buffer = BufferCapacity::infinite();
      const auto report = sweep_buffers(oracle::random_circuit(rng, 150), cfg);
      bool ok = true;
      for (std::size_t k = 1; k < report.rows.size(); ++k) {
        ok = ok && report.rows[k - 1].assembly_depth >= report.rows[k].assembly_depth;
      }
      const auto best = optimal_buffer(report);
      for (const auto& row : report.rows) {
        if (row.capacity == best) {
          ok = ok && row.assembly_depth == report.baseline_depth;
        }
      }
      bad += ok ? 0 : 1;
    }
    return Outcome{bad == 0, std::to_string(cases) + " cases, " + std::to_string(bad) +
                                 " violations"};
  });

  criterion(12, "sweep determinism", 2.0, [&] {
    const auto circuit = parse_circuit(serialize_circuit(generate_adder(16, uniform)));
    SweepConfig cfg;
    cfg.capacities = zero_to_eight_inf();
    const auto first = io::sweep_to_csv(sweep_buffers(circuit, cfg));
    bool same = true;
    for (int i = 0; i < 5; ++i) {
      same = same && io::sweep_to_csv(sweep_buffers(circuit, cfg)) == first;
    }
    std::ifstream in(std::string(DISTILLQ_GOLDEN_DIR) + "/sweep_adder16.csv", std::ios::binary);
    std::ostringstream golden;
    golden << in.rdbuf();
    const bool matches = golden.str() == first;
    return Outcome{same && matches, std::string("6 runs identical: ") + (same ? "yes" : "no") +
                                        ", golden diff: " + (matches ? "none" : "DIFFERS")};
  });

  std::printf("%d criteria failed\n", failures);
  return failures;
}
