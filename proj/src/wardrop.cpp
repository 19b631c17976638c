#include "demandsig/wardrop.hpp"

#include "demandsig/lemke.hpp"
#include "demandsig/linalg.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

namespace demandsig {

bool Support::contains(EdgeId e) const {
  return std::binary_search(edges.begin(), edges.end(), e);
}

bool Support::subset_of(const Support& other) const {
  return std::includes(other.edges.begin(), other.edges.end(), edges.begin(), edges.end());
}

std::string Support::str() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < edges.size(); ++i) out << (i ? "," : "") << edges[i];
  out << '}';
  return out.str();
}

template <Scalar T>
T expected_edge_cost(const AffineCost<T>& cost, const T& load, const Belief<T>& mu,
                     const StateSpace<T>& states) {
  return cost.slope * second_moment(mu, states) * load + cost.offset * first_moment(mu, states);
}

template <Scalar T>
T virtual_demand(const Belief<T>& mu, const StateSpace<T>& states) {
  return second_moment(mu, states) / first_moment(mu, states);
}

template <Scalar T>
std::vector<std::optional<T>> shortest_distances(const Network<T>& net,
                                                 std::span<const T> edge_cost) {
  std::vector<std::vector<EdgeId>> out(net.num_vertices);
  for (EdgeId e = 0; e < net.num_edges(); ++e) out[net.edges[e].tail].push_back(e);
  std::vector<std::optional<T>> dist(net.num_vertices);
  std::vector<bool> done(net.num_vertices, false);
  using Item = std::pair<T, VertexId>;
  auto cmp = [](const Item& a, const Item& b) { return a.first > b.first; };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);
  dist[net.source] = T(0);
  heap.emplace(T(0), net.source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = true;
    for (EdgeId e : out[u]) {
      VertexId v = net.edges[e].head;
      T nd = d + edge_cost[e];
      if (!dist[v] || nd < *dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return dist;
}

namespace {

// Potentials for vertices without an s-path: above every reachable value.
template <Scalar T>
std::vector<T> fill_unreachable(const std::vector<std::optional<T>>& dist,
                                std::span<const T> edge_cost) {
  T top{0};
  for (const auto& d : dist)
    if (d) top = std::max(top, *d);
  for (const auto& c : edge_cost) top += abs_of(c);
  std::vector<T> out;
  for (const auto& d : dist) out.push_back(d ? *d : top + T(1));
  return out;
}

// Bellman-Ford, tolerating negative costs; nullopt on a negative cycle.
template <Scalar T>
std::optional<std::vector<std::optional<T>>> bellman_ford(const Network<T>& net,
                                                          std::span<const T> edge_cost) {
  std::vector<std::optional<T>> dist(net.num_vertices);
  dist[net.source] = T(0);
  for (int round = 0; round < net.num_vertices; ++round) {
    bool changed = false;
    for (EdgeId e = 0; e < net.num_edges(); ++e) {
      const auto& edge = net.edges[e];
      if (!dist[edge.tail]) continue;
      T nd = *dist[edge.tail] + edge_cost[e];
      if (!dist[edge.head] || nd < *dist[edge.head]) {
        dist[edge.head] = nd;
        changed = true;
      }
    }
    if (!changed) return dist;
  }
  return std::nullopt;
}

template <Scalar T>
std::vector<T> edge_costs(const Instance<T>& inst, const Belief<T>& mu, const std::vector<T>& load) {
  const T m1 = first_moment(mu, inst.states);
  const T m2 = second_moment(mu, inst.states);
  std::vector<T> c(load.size());
  for (std::size_t e = 0; e < load.size(); ++e) {
    const auto& cost = inst.network.edges[e].cost;
    c[e] = cost.slope * m2 * load[e] + cost.offset * m1;
  }
  return c;
}

}  // namespace

template <Scalar T>
RoutedFlow<T> route_equilibrium(const Network<T>& net, std::span<const T> slope,
                                std::span<const T> offset, const T& volume) {
  const int ne = net.num_edges();
  std::vector<int> index(net.num_vertices, -1);
  int nv = 0;
  for (VertexId v = 0; v < net.num_vertices; ++v) {
    if (v != net.source) index[v] = ne + nv++;
  }
  // z = (y_e, p_v) with p_v = pi_v + K > 0, so that no vertex absorbs flow.
  const T K{1};
  const int n = ne + nv;
  DenseMatrix<T> m(n, n);
  std::vector<T> q(n, T(0));
  for (EdgeId e = 0; e < ne; ++e) {
    const auto& edge = net.edges[e];
    m(e, e) = slope[e];
    q[e] = offset[e];
    if (edge.tail == net.source) {
      q[e] += K;
    } else {
      m(e, index[edge.tail]) += T(1);
    }
    if (edge.head == net.source) {
      q[e] -= K;
    } else {
      m(e, index[edge.head]) -= T(1);
    }
    if (edge.head != net.source) m(index[edge.head], e) += T(1);
    if (edge.tail != net.source) m(index[edge.tail], e) -= T(1);
  }
  q[index[net.sink]] = -volume;

  auto lcp = solve_lcp(m, q);
  if (!lcp.solved) throw SolverError("equilibrium pivoting failed: " + lcp.failure);

  RoutedFlow<T> out;
  out.volume.assign(lcp.z.begin(), lcp.z.begin() + ne);
  if constexpr (!is_exact_v<T>) {
    for (auto& y : out.volume) y = std::max(y, 0.0);
  }
  std::vector<T> cost(ne);
  for (EdgeId e = 0; e < ne; ++e) cost[e] = slope[e] * out.volume[e] + offset[e];
  out.potential = fill_unreachable<T>(shortest_distances(net, std::span<const T>(cost)), cost);
  return out;
}

template <Scalar T>
Flow<T> flow_from_loads(const Instance<T>& inst, const Belief<T>& mu, std::vector<T> load) {
  Flow<T> flow;
  flow.belief = mu;
  auto cost = edge_costs(inst, mu, load);
  flow.potential =
      fill_unreachable<T>(shortest_distances(inst.network, std::span<const T>(cost)), cost);
  flow.load = std::move(load);
  flow.cost = flow.potential[inst.network.sink];
  return flow;
}

template <Scalar T>
Flow<T> solve_wardrop(const Instance<T>& inst, const Belief<T>& mu, const WardropOptions& options) {
  if (mu.size() != inst.states.size()) throw ValidationError("belief size does not match states");
  if constexpr (!is_exact_v<T>) {
    if (options.method == EquilibriumMethod::FrankWolfe) {
      return solve_wardrop_frank_wolfe(inst, mu, options);
    }
  }
  const T m1 = first_moment(mu, inst.states);
  const T m2 = second_moment(mu, inst.states);
  std::vector<T> slope, offset;
  for (const auto& e : inst.network.edges) {
    slope.push_back(e.cost.slope);
    offset.push_back(e.cost.offset * m1);
  }
  auto routed = route_equilibrium(inst.network, std::span<const T>(slope),
                                  std::span<const T>(offset), m2);
  std::vector<T> load;
  for (const auto& y : routed.volume) load.push_back(y / m2);
  Flow<T> flow;
  flow.belief = mu;
  flow.load = std::move(load);
  flow.potential = std::move(routed.potential);
  flow.cost = flow.potential[inst.network.sink];
  if constexpr (!is_exact_v<T>) {
    if (options.project) {
      try {
        auto proj = solve_for_support(inst, mu, active_subnetwork(inst, flow, options.tol),
                                      options.tol);
        if (proj.feasible()) return proj.flow;
      } catch (const SupportError&) {
      }
    }
  }
  return flow;
}

template <Scalar T>
T equilibrium_cost(const Instance<T>& inst, const Belief<T>& mu, const WardropOptions& options) {
  return solve_wardrop(inst, mu, options).cost;
}

template <Scalar T>
Support active_support(const Instance<T>& inst, const Flow<T>& flow, const Tolerances& tol) {
  const T active = tolerance<T>(tol.active);
  auto cost = edge_costs(inst, flow.belief, flow.load);
  Support s;
  for (EdgeId e = 0; e < inst.network.num_edges(); ++e) {
    const auto& edge = inst.network.edges[e];
    if (flow.potential[edge.tail] + cost[e] - flow.potential[edge.head] <= active) {
      s.edges.push_back(e);
    }
  }
  return s;
}

template <Scalar T>
Support active_subnetwork(const Instance<T>& inst, const Flow<T>& flow, const Tolerances& tol) {
  const auto& net = inst.network;
  Support tight = active_support(inst, flow, tol);
  std::vector<std::vector<EdgeId>> out(net.num_vertices), in(net.num_vertices);
  for (EdgeId e : tight.edges) {
    out[net.edges[e].tail].push_back(e);
    in[net.edges[e].head].push_back(e);
  }
  auto sweep = [&](VertexId start, bool forward) {
    std::vector<bool> seen(net.num_vertices, false);
    std::vector<VertexId> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      VertexId u = stack.back();
      stack.pop_back();
      for (EdgeId e : forward ? out[u] : in[u]) {
        VertexId v = forward ? net.edges[e].head : net.edges[e].tail;
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    return seen;
  };
  auto from_s = sweep(net.source, true);
  auto to_t = sweep(net.sink, false);
  Support s;
  for (EdgeId e : tight.edges) {
    if (from_s[net.edges[e].tail] && to_t[net.edges[e].head]) s.edges.push_back(e);
  }
  return s;
}

template <Scalar T>
SupportSolution<T> solve_for_support(const Instance<T>& inst, const Belief<T>& mu,
                                     const Support& support, const Tolerances& tol) {
  const auto& net = inst.network;
  const T m1 = first_moment(mu, inst.states);
  const T m2 = second_moment(mu, inst.states);
  const int k = static_cast<int>(support.size());
  std::vector<int> index(net.num_vertices, -1);
  int nv = 0;
  auto touch = [&](VertexId v) {
    if (v != net.source && index[v] < 0) index[v] = k + nv++;
  };
  for (EdgeId e : support.edges) {
    if (e < 0 || e >= net.num_edges()) throw SupportError("support edge out of range");
    touch(net.edges[e].tail);
    touch(net.edges[e].head);
  }
  if (index[net.sink] < 0) throw SupportError("support " + support.str() + " misses the sink");

  const int n = k + nv;
  DenseMatrix<T> a(n, n);
  std::vector<T> rhs(n, T(0));
  for (int i = 0; i < k; ++i) {
    const auto& edge = net.edges[support.edges[i]];
    a(i, i) = edge.cost.slope;
    rhs[i] = -edge.cost.offset * m1;
    if (edge.tail != net.source) a(i, index[edge.tail]) += T(1);
    if (edge.head != net.source) a(i, index[edge.head]) -= T(1);
    if (edge.head != net.source) a(index[edge.head], i) += T(1);
    if (edge.tail != net.source) a(index[edge.tail], i) -= T(1);
  }
  rhs[index[net.sink]] = m2;
  auto x = solve_linear_system(std::move(a), std::move(rhs));
  if (!x) throw SupportError("support " + support.str() + " has a singular system");

  SupportSolution<T> sol;
  sol.flow.belief = mu;
  sol.flow.load.assign(net.num_edges(), T(0));
  const T load_tol = tolerance<T>(tol.load);
  for (int i = 0; i < k; ++i) {
    T x_e = (*x)[i] / m2;
    sol.flow.load[support.edges[i]] = x_e;
    if (x_e < -load_tol) sol.negative_load = true;
  }
  auto cost = edge_costs(inst, mu, sol.flow.load);
  auto dist = bellman_ford(net, std::span<const T>(cost));
  std::vector<T> potential;
  if (dist) {
    potential = fill_unreachable<T>(*dist, cost);
  } else {
    sol.profitable_deviation = true;
    potential.assign(net.num_vertices, T(0));
  }
  const T wardrop = tolerance<T>(tol.wardrop);
  for (VertexId v = 0; v < net.num_vertices; ++v) {
    if (index[v] < 0) continue;
    const T& pi = (*x)[index[v]];
    if (dist && (!(*dist)[v] || *(*dist)[v] < pi - wardrop)) sol.profitable_deviation = true;
    potential[v] = pi;
  }
  potential[net.source] = T(0);
  sol.flow.potential = std::move(potential);
  sol.flow.cost = sol.flow.potential[net.sink];
  return sol;
}

template <Scalar T>
T system_optimum(const Instance<T>& inst, const T& demand) {
  std::vector<T> slope, offset;
  for (const auto& e : inst.network.edges) {
    slope.push_back(T(2) * e.cost.slope);
    offset.push_back(e.cost.offset);
  }
  auto routed = route_equilibrium(inst.network, std::span<const T>(slope),
                                  std::span<const T>(offset), demand);
  T total{0};
  for (EdgeId e = 0; e < inst.network.num_edges(); ++e) {
    const auto& y = routed.volume[e];
    total += y * inst.network.edges[e].cost(y);
  }
  return total;
}

#define DEMANDSIG_INSTANTIATE(T)                                                                \
  template T expected_edge_cost(const AffineCost<T>&, const T&, const Belief<T>&,               \
                                const StateSpace<T>&);                                          \
  template T virtual_demand(const Belief<T>&, const StateSpace<T>&);                            \
  template std::vector<std::optional<T>> shortest_distances(const Network<T>&,                  \
                                                            std::span<const T>);                \
  template RoutedFlow<T> route_equilibrium(const Network<T>&, std::span<const T>,               \
                                           std::span<const T>, const T&);                       \
  template Flow<T> flow_from_loads(const Instance<T>&, const Belief<T>&, std::vector<T>);       \
  template Flow<T> solve_wardrop(const Instance<T>&, const Belief<T>&, const WardropOptions&);  \
  template T equilibrium_cost(const Instance<T>&, const Belief<T>&, const WardropOptions&);     \
  template Support active_support(const Instance<T>&, const Flow<T>&, const Tolerances&);       \
  template Support active_subnetwork(const Instance<T>&, const Flow<T>&, const Tolerances&);    \
  template SupportSolution<T> solve_for_support(const Instance<T>&, const Belief<T>&,           \
                                                const Support&, const Tolerances&);             \
  template T system_optimum(const Instance<T>&, const T&);

DEMANDSIG_INSTANTIATE(double)
DEMANDSIG_INSTANTIATE(Rational)

}  // namespace demandsig
