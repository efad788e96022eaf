// Shared oracles and generators for the unit, property and acceptance tests.
#pragma once

#include "distillq/circuit.hpp"
#include "distillq/emulator.hpp"
#include "distillq/markov.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

namespace distillq::oracle {

using Dense = std::vector<std::vector<double>>;

inline SlotTimeline make_timeline(std::initializer_list<int> bits) {
  SlotTimeline tl;
  for (int b : bits) {
    tl.slots.push_back(b != 0 ? Slot::T : Slot::Clifford);
  }
  return tl;
}

/// Power iteration from the uniform distribution until the step change drops
/// below `tol` (or `max_iter` sweeps).
inline std::vector<double> power_iteration(const Dense& p, double tol = 1e-15,
                                           std::size_t max_iter = 200000) {
  const auto n = p.size();
  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (std::size_t it = 0; it < std::max<std::size_t>(max_iter, 1000); ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        next[j] += v[i] * p[i][j];
      }
    }
    const double s = std::accumulate(next.begin(), next.end(), 0.0);
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] /= s;
      diff = std::max(diff, std::abs(next[j] - v[j]));
    }
    v.swap(next);
    if (it >= 1000 && diff < tol) {
      break;
    }
  }
  return v;
}

/// ||nu P - nu||_inf
inline double balance_residual(const Dense& p, const std::vector<double>& nu) {
  double worst = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      s += nu[i] * p[i][j];
    }
    worst = std::max(worst, std::abs(s - nu[j]));
  }
  return worst;
}

/// Dense row-stochastic matrix with a positive diagonal and a Hamiltonian
/// cycle, so it is irreducible and aperiodic. Other entries are sparse.
inline Dense random_ergodic(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> w(0.05, 1.0);
  std::bernoulli_distribution keep(0.4);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Dense p(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    p[perm[k]][perm[(k + 1) % n]] += w(rng);
  }
  for (std::size_t i = 0; i < n; ++i) {
    p[i][i] += w(rng);
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && keep(rng)) {
        p[i][j] += w(rng);
      }
    }
    const double s = std::accumulate(p[i].begin(), p[i].end(), 0.0);
    for (auto& x : p[i]) {
      x /= s;
    }
  }
  return p;
}

/// Birth-death chain on 0..n-1: up with p, down with q, stay otherwise.
inline Dense birth_death(std::size_t n, double up, double down) {
  Dense p(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double stay = 1.0;
    if (i + 1 < n) {
      p[i][i + 1] = up;
      stay -= up;
    }
    if (i > 0) {
      p[i][i - 1] = down;
      stay -= down;
    }
    p[i][i] = stay;
  }
  return p;
}

/// Detailed balance: nu_{k+1} / nu_k = up / down.
inline std::vector<double> birth_death_closed_form(std::size_t n, double up,
                                                   double down) {
  std::vector<double> nu(n);
  const double r = up / down;
  double x = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    nu[k] = x;
    x *= r;
  }
  const double s = std::accumulate(nu.begin(), nu.end(), 0.0);
  for (auto& v : nu) {
    v /= s;
  }
  return nu;
}

inline std::vector<std::size_t> iota_states(std::size_t n) {
  std::vector<std::size_t> s(n);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

inline SlotTimeline random_timeline(std::mt19937_64& rng, std::size_t max_len = 120) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_real_distribution<double> dens(0.0, 1.0);
  const double density = dens(rng);
  std::bernoulli_distribution is_t(density);
  SlotTimeline tl;
  const auto n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    tl.slots.push_back(is_t(rng) ? Slot::T : Slot::Clifford);
  }
  return tl;
}

inline Circuit random_circuit(std::mt19937_64& rng, std::size_t max_len = 120) {
  const auto tl = random_timeline(rng, max_len);
  Circuit c;
  c.n_qubits = 3;
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_int_distribution<Qubit> q(0, 2);
  for (auto s : tl.slots) {
    if (s == Slot::T) {
      c.gates.push_back({GateKind::T, {q(rng)}});
      continue;
    }
    switch (kind(rng)) {
    case 0: c.gates.push_back({GateKind::H, {q(rng)}}); break;
    case 1: c.gates.push_back({GateKind::S, {q(rng)}}); break;
    case 2: c.gates.push_back({GateKind::CX, {0, 1}}); break;
    default: c.gates.push_back({GateKind::CZ, {1, 2}}); break;
    }
  }
  if (c.gates.empty()) {
    c.gates.push_back({GateKind::H, {0}});
  }
  return c;
}

inline EmulatorConfig random_config(std::mt19937_64& rng, bool allow_lookahead = true) {
  std::uniform_int_distribution<std::int64_t> den(1, 12);
  EmulatorConfig cfg;
  const auto d = den(rng);
  std::uniform_int_distribution<std::int64_t> num(1, d);
  cfg.production_rate = Rational(num(rng), d);
  std::uniform_int_distribution<int> cap(-1, 6);
  const int b = cap(rng);
  cfg.buffer = b < 0 ? BufferCapacity::infinite()
                     : BufferCapacity::finite(static_cast<std::size_t>(b));
  std::uniform_int_distribution<std::size_t> warm(0, 5);
  cfg.warmup_remaining = warm(rng);
  const std::size_t stock_max = cfg.buffer.is_infinite() ? 4 : std::min<std::size_t>(4, cfg.buffer.value());
  std::uniform_int_distribution<std::size_t> stock(0, stock_max);
  cfg.initial_stock = stock(rng);
  std::bernoulli_distribution look(0.3);
  if (allow_lookahead && look(rng)) {
    std::uniform_int_distribution<std::size_t> win(1, 10);
    cfg.policy = Lookahead{win(rng)};
  }
  return cfg;
}

} // namespace distillq::oracle
