#include "distillq/markov.hpp"

#include "distillq/error.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <span>
#include <stack>
#include <tuple>

namespace distillq {

namespace {

// Strongly connected components of the positive-probability graph.
struct Components {
  std::vector<std::size_t> of;   // component id per state
  std::size_t count = 0;
  std::vector<bool> closed;      // no edge leaves the component
};

Components strongly_connected(const TransitionMatrix& m) {
  const auto n = m.size();
  constexpr auto kUnset = static_cast<std::size_t>(-1);
  Components c;
  c.of.assign(n, kUnset);
  std::vector<std::size_t> index(n, kUnset);
  std::vector<std::size_t> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0;

  // Iterative Tarjan: frames of (vertex, next entry position).
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) {
      continue;
    }
    frames.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      const auto row = m.row(v);
      if (pos < row.size()) {
        const auto& e = row[pos++];
        if (e.prob <= 0.0) {
          continue;
        }
        const auto w = e.col;
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const auto done = v;
      frames.pop_back();
      if (!frames.empty()) {
        auto& parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        std::size_t w = kUnset;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          c.of[w] = c.count;
        } while (w != done);
        ++c.count;
      }
    }
  }
  c.closed.assign(c.count, true);
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& e : m.row(v)) {
      if (e.prob > 0.0 && c.of[e.col] != c.of[v]) {
        c.closed[c.of[v]] = false;
      }
    }
  }
  return c;
}

std::vector<std::size_t> members(const Components& c, std::size_t id) {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < c.of.size(); ++v) {
    if (c.of[v] == id) {
      out.push_back(v);
    }
  }
  return out;
}

// gcd of cycle lengths inside one component, from BFS levels.
std::size_t period_of(const TransitionMatrix& m, const Components& c,
                      std::size_t id) {
  const auto nodes = members(c, id);
  constexpr auto kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> level(m.size(), kUnset);
  std::queue<std::size_t> queue;
  level[nodes.front()] = 0;
  queue.push(nodes.front());
  std::size_t g = 0;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop();
    for (const auto& e : m.row(v)) {
      if (e.prob <= 0.0 || c.of[e.col] != id) {
        continue;
      }
      if (level[e.col] == kUnset) {
        level[e.col] = level[v] + 1;
        queue.push(e.col);
      } else {
        const auto a = level[v] + 1;
        const auto b = level[e.col];
        g = std::gcd(g, a > b ? a - b : b - a);
      }
    }
  }
  // A single state without a self-loop cannot be closed; treat as period 1.
  return g == 0 ? 1 : g;
}

std::vector<bool> reachable_from(const TransitionMatrix& m, std::size_t start) {
  std::vector<bool> seen(m.size(), false);
  std::stack<std::size_t> todo;
  todo.push(start);
  seen[start] = true;
  while (!todo.empty()) {
    const auto v = todo.top();
    todo.pop();
    for (const auto& e : m.row(v)) {
      if (e.prob > 0.0 && !seen[e.col]) {
        seen[e.col] = true;
        todo.push(e.col);
      }
    }
  }
  return seen;
}

// Balance equations on `nodes` (a closed class) with the last equation
// replaced by normalization.
std::vector<double> solve_balance(const TransitionMatrix& m,
                                  const std::vector<std::size_t>& nodes) {
  const auto k = nodes.size();
  if (k == 1) {
    return {1.0};
  }
  std::vector<std::size_t> local(m.size(), k);
  for (std::size_t i = 0; i < k; ++i) {
    local[nodes[i]] = i;
  }
  using Index = Eigen::Index;
  std::vector<Eigen::Triplet<double>> triplets;
  const auto last = static_cast<Index>(k - 1);
  for (std::size_t i = 0; i < k; ++i) {
    // Column i of (P^T - I) is row i of P minus e_i.
    const auto col = static_cast<Index>(i);
    for (const auto& e : m.row(nodes[i])) {
      const auto j = local[e.col];
      if (j == k || static_cast<Index>(j) == last) {
        continue;
      }
      triplets.emplace_back(static_cast<Index>(j), col, e.prob);
    }
    if (col != last) {
      triplets.emplace_back(col, col, -1.0);
    }
    triplets.emplace_back(last, col, 1.0);
  }
  Eigen::SparseMatrix<double> a(static_cast<Index>(k), static_cast<Index>(k));
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw Error("steady-state system is singular");
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Index>(k));
  rhs[last] = 1.0;
  const Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) {
    throw Error("steady-state solve failed");
  }
  std::vector<double> nu(k);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    nu[i] = std::max(0.0, x[static_cast<Index>(i)]);
    sum += nu[i];
  }
  for (auto& v : nu) {
    v /= sum;
  }
  return nu;
}

} // namespace

double TransitionMatrix::prob(std::size_t i, std::size_t j) const {
  for (const auto& e : row(i)) {
    if (e.col == j) {
      return e.prob;
    }
  }
  return 0.0;
}

std::uint64_t TransitionMatrix::count(std::size_t i, std::size_t j) const {
  for (const auto& e : row(i)) {
    if (e.col == j) {
      return e.count;
    }
  }
  return 0;
}

std::uint64_t TransitionMatrix::visits(std::size_t i) const {
  std::uint64_t total = 0;
  for (const auto& e : row(i)) {
    total += e.count;
  }
  if (restart_ && restart_->first == i) {
    ++total;
  }
  return total;
}

std::optional<std::size_t> TransitionMatrix::index_of(std::size_t state) const {
  const auto it = std::lower_bound(states_.begin(), states_.end(), state);
  if (it == states_.end() || *it != state) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - states_.begin());
}

std::vector<std::vector<double>> TransitionMatrix::dense_probs() const {
  std::vector<std::vector<double>> out(size(), std::vector<double>(size(), 0.0));
  for (std::size_t i = 0; i < size(); ++i) {
    for (const auto& e : row(i)) {
      out[i][e.col] = e.prob;
    }
  }
  return out;
}

std::vector<std::vector<std::uint64_t>> TransitionMatrix::dense_counts() const {
  std::vector<std::vector<std::uint64_t>> out(size(),
                                              std::vector<std::uint64_t>(size(), 0));
  for (std::size_t i = 0; i < size(); ++i) {
    for (const auto& e : row(i)) {
      out[i][e.col] = e.count;
    }
  }
  return out;
}

namespace {

void check_states(const std::vector<std::size_t>& states, std::size_t rows) {
  if (states.empty()) {
    throw InvalidConfig("transition matrix has no states");
  }
  if (states.size() != rows) {
    throw InvalidConfig("state list and matrix size differ");
  }
  for (std::size_t i = 1; i < states.size(); ++i) {
    if (states[i] <= states[i - 1]) {
      throw InvalidConfig("states must be strictly increasing");
    }
  }
}

} // namespace

TransitionMatrix
TransitionMatrix::from_probabilities(std::vector<std::size_t> states,
                                     const std::vector<std::vector<double>>& probs,
                                     double tolerance) {
  check_states(states, probs.size());
  TransitionMatrix m;
  m.states_ = std::move(states);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i].size() != probs.size()) {
      throw InvalidConfig("transition matrix must be square");
    }
    double sum = 0.0;
    for (const auto p : probs[i]) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw InvalidConfig("transition probabilities must be finite and >= 0");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > tolerance) {
      throw InvalidConfig("row " + std::to_string(i) + " sums to " +
                          std::to_string(sum));
    }
    for (std::size_t j = 0; j < probs[i].size(); ++j) {
      if (probs[i][j] > 0.0) {
        m.entries_.push_back({j, 0, probs[i][j] / sum});
      }
    }
    m.row_ptr_.push_back(m.entries_.size());
  }
  return m;
}

void TransitionMatrix::set_counts(
    const std::vector<std::vector<std::uint64_t>>& counts) {
  if (counts.size() != size()) {
    throw InvalidConfig("count matrix size differs from the chain");
  }
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (counts[i].size() != size()) {
      throw InvalidConfig("count matrix must be square");
    }
    std::uint64_t placed = 0;
    for (auto& e : std::span(entries_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i])) {
      e.count = counts[i][e.col];
      placed += e.count;
    }
    const auto row_total = std::accumulate(counts[i].begin(), counts[i].end(), std::uint64_t{0});
    if (placed != row_total) {
      throw InvalidConfig("row " + std::to_string(i) +
                          " has counts on zero-probability edges");
    }
    total += row_total;
  }
  total_ = total;
}

TransitionMatrix TransitionMatrix::from_counts(
    std::vector<std::size_t> states,
    const std::vector<std::vector<std::uint64_t>>& counts) {
  check_states(states, counts.size());
  TransitionMatrix m;
  m.states_ = std::move(states);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].size() != counts.size()) {
      throw InvalidConfig("count matrix must be square");
    }
    const auto sum = std::accumulate(counts[i].begin(), counts[i].end(),
                                     std::uint64_t{0});
    if (sum == 0) {
      throw InvalidConfig("row " + std::to_string(i) + " has no transitions");
    }
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      if (counts[i][j] > 0) {
        m.entries_.push_back({j, counts[i][j],
                              static_cast<double>(counts[i][j]) /
                                  static_cast<double>(sum)});
      }
    }
    m.total_ += sum;
    m.row_ptr_.push_back(m.entries_.size());
  }
  return m;
}

TransitionMatrix build_chain(std::span<const std::size_t> occupancy,
                             Closure closure) {
  if (occupancy.size() < 2) {
    throw InsufficientTrace();
  }
  TransitionMatrix m;
  m.states_.assign(occupancy.begin(), occupancy.end());
  std::sort(m.states_.begin(), m.states_.end());
  m.states_.erase(std::unique(m.states_.begin(), m.states_.end()),
                  m.states_.end());
  const auto n = m.states_.size();

  std::vector<std::size_t> idx(occupancy.size());
  for (std::size_t t = 0; t < occupancy.size(); ++t) {
    idx[t] = *m.index_of(occupancy[t]);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(occupancy.size());
  for (std::size_t t = 0; t + 1 < idx.size(); ++t) {
    pairs.emplace_back(idx[t], idx[t + 1]);
  }
  m.total_ = pairs.size();
  std::sort(pairs.begin(), pairs.end());

  if (closure == Closure::Restart) {
    m.restart_ = std::make_pair(idx.back(), idx.front());
  }

  // Row-by-row CSR assembly; the restart edge joins its row as count 0 when
  // the pair tally has no such entry.
  std::size_t p = 0;
  std::vector<std::uint64_t> row_sum(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto begin = m.entries_.size();
    while (p < pairs.size() && pairs[p].first == i) {
      const auto col = pairs[p].second;
      std::uint64_t c = 0;
      while (p < pairs.size() && pairs[p].first == i && pairs[p].second == col) {
        ++c;
        ++p;
      }
      m.entries_.push_back({col, c, 0.0});
      row_sum[i] += c;
    }
    std::uint64_t extra = 0;
    if (m.restart_ && m.restart_->first == i) {
      extra = 1;
      const auto col = m.restart_->second;
      const auto it = std::find_if(m.entries_.begin() + static_cast<std::ptrdiff_t>(begin),
                                   m.entries_.end(),
                                   [&](const auto& e) { return e.col == col; });
      if (it == m.entries_.end()) {
        m.entries_.push_back({col, 0, 0.0});
        std::sort(m.entries_.begin() + static_cast<std::ptrdiff_t>(begin),
                  m.entries_.end(),
                  [](const auto& a, const auto& b) { return a.col < b.col; });
      }
    }
    const auto denom = static_cast<double>(row_sum[i] + extra);
    if (denom == 0.0) {
      // Only the final state of an open trace can end up here.
      m.entries_.push_back({i, 0, 1.0});
    } else {
      for (auto k = begin; k < m.entries_.size(); ++k) {
        auto& e = m.entries_[k];
        const auto bonus = (extra != 0 && e.col == m.restart_->second) ? 1U : 0U;
        e.prob = static_cast<double>(e.count + bonus) / denom;
      }
    }
    m.row_ptr_.push_back(m.entries_.size());
  }
  return m;
}

TransitionMatrix build_chain(const EmulationTrace& trace, Closure closure) {
  return build_chain(std::span<const std::size_t>(trace.occupancy), closure);
}

ErgodicityReport check_ergodic(const TransitionMatrix& matrix) {
  ErgodicityReport r;
  if (matrix.size() == 0) {
    return r;
  }
  const auto comps = strongly_connected(matrix);
  r.irreducible = comps.count == 1;
  r.aperiodic = true;
  for (std::size_t id = 0; id < comps.count; ++id) {
    if (comps.closed[id]) {
      ++r.closed_classes;
      if (period_of(matrix, comps, id) != 1) {
        r.aperiodic = false;
      }
    }
  }
  const auto zero_class = comps.of[0];
  r.period = period_of(matrix, comps, zero_class);
  for (const auto v : members(comps, zero_class)) {
    r.communicating_class_of_zero.push_back(matrix.states()[v]);
  }
  r.ergodic = r.irreducible && r.aperiodic && r.finite;
  return r;
}

SteadyStateDistribution steady_state(const TransitionMatrix& matrix) {
  if (matrix.size() == 0) {
    throw InvalidConfig("empty transition matrix");
  }
  const auto comps = strongly_connected(matrix);
  std::vector<std::size_t> closed;
  for (std::size_t id = 0; id < comps.count; ++id) {
    if (comps.closed[id]) {
      closed.push_back(id);
    }
  }
  SteadyStateDistribution out;
  out.states = matrix.states();

  std::size_t target = closed.front();
  if (closed.size() > 1) {
    if (!matrix.has_counts()) {
      throw NonUniqueSteadyState(std::to_string(closed.size()) +
                                 " closed classes and no visit counts");
    }
    std::size_t busiest = 0;
    for (std::size_t i = 1; i < matrix.size(); ++i) {
      if (matrix.visits(i) > matrix.visits(busiest)) {
        busiest = i;
      }
    }
    const auto seen = reachable_from(matrix, busiest);
    std::vector<std::size_t> candidates;
    for (const auto id : closed) {
      if (seen[members(comps, id).front()]) {
        candidates.push_back(id);
      }
    }
    if (candidates.size() != 1) {
      throw NonUniqueSteadyState(std::to_string(closed.size()) +
                                 " closed classes reachable ambiguously");
    }
    target = candidates.front();
  }

  const auto nodes = members(comps, target);
  const auto local = solve_balance(matrix, nodes);
  out.nu.assign(matrix.size(), 0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out.nu[nodes[i]] = local[i];
  }
  out.reduced = nodes.size() != matrix.size();
  out.periodic = period_of(matrix, comps, target) != 1;
  if (out.reduced) {
    out.warning = "chain is reducible; solved on a closed class of " +
                  std::to_string(nodes.size()) + " state(s)";
  }
  if (out.periodic) {
    out.warning += std::string(out.warning.empty() ? "" : "; ") +
                   "chain is periodic; distribution is a time average";
  }

  std::vector<double> next(matrix.size(), 0.0);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    for (const auto& e : matrix.row(i)) {
      next[e.col] += out.nu[i] * e.prob;
    }
  }
  for (std::size_t j = 0; j < matrix.size(); ++j) {
    out.residual = std::max(out.residual, std::abs(next[j] - out.nu[j]));
  }
  return out;
}

QueueMetrics queue_metrics(const SteadyStateDistribution& nu,
                           const TransitionMatrix& matrix) {
  if (nu.nu.size() != matrix.size() || nu.states != matrix.states()) {
    throw InvalidConfig("distribution does not match the chain's states");
  }
  QueueMetrics q;
  const auto& states = matrix.states();
  if (!states.empty() && states.front() == 0) {
    q.v0 = nu.nu.front();
  }
  q.v_full = nu.nu.empty() ? 0.0 : nu.nu.back();
  for (std::size_t i = 0; i < states.size(); ++i) {
    q.mean_jobs += static_cast<double>(states[i]) * nu.nu[i];
  }
  q.utilization = 1.0 - q.v0;
  q.num_states = matrix.size();
  q.num_transitions = matrix.total_transitions();
  return q;
}

} // namespace distillq
