#include "demandsig/model.hpp"

#include <algorithm>
#include <sstream>

namespace demandsig {

template <Scalar T>
Belief<T> Belief<T>::point_mass(std::size_t num_states, std::size_t state) {
  std::vector<T> p(num_states, T(0));
  p.at(state) = T(1);
  return Belief(std::move(p));
}

template <Scalar T>
Belief<T> Belief<T>::two_state(const T& high) {
  return Belief({T(1) - high, high});
}

template <Scalar T>
bool Belief<T>::is_point_mass() const {
  return std::count_if(p_.begin(), p_.end(), [](const T& v) { return v != T(0); }) <= 1;
}

template <Scalar T>
T first_moment(const Belief<T>& mu, const StateSpace<T>& states) {
  T m{0};
  for (std::size_t i = 0; i < states.size(); ++i) m += mu[i] * states.demands[i];
  return m;
}

template <Scalar T>
T second_moment(const Belief<T>& mu, const StateSpace<T>& states) {
  T m{0};
  for (std::size_t i = 0; i < states.size(); ++i) {
    m += mu[i] * states.demands[i] * states.demands[i];
  }
  return m;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& e : errors) out << "error: " << e << '\n';
  for (const auto& w : warnings) out << "warning: " << w << '\n';
  return out.str();
}

namespace {

std::vector<bool> reach(int n, const std::vector<std::pair<int, int>>& arcs, int start,
                        bool forward) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [u, v] : arcs) {
    if (forward) {
      adj[u].push_back(v);
    } else {
      adj[v].push_back(u);
    }
  }
  std::vector<bool> seen(n, false);
  std::vector<int> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

template <Scalar T>
bool terminals_in_range(const Network<T>& net) {
  return net.source >= 0 && net.source < net.num_vertices && net.sink >= 0 &&
         net.sink < net.num_vertices;
}

}  // namespace

template <Scalar T>
std::vector<EdgeId> dead_edges(const Network<T>& net) {
  const int s = net.source;
  const int t = net.sink;
  std::vector<std::pair<int, int>> arcs;
  for (const auto& e : net.edges) {
    if (e.head != s && e.tail != t) arcs.emplace_back(e.tail, e.head);
  }
  auto from_s = reach(net.num_vertices, arcs, s, true);
  auto to_t = reach(net.num_vertices, arcs, t, false);
  std::vector<EdgeId> dead;
  for (EdgeId i = 0; i < net.num_edges(); ++i) {
    const auto& e = net.edges[i];
    if (e.head == s || e.tail == t || !from_s[e.tail] || !to_t[e.head]) dead.push_back(i);
  }
  return dead;
}

template <Scalar T>
ValidationReport validate(const Instance<T>& instance) {
  ValidationReport report;
  const auto& net = instance.network;
  auto error = [&](std::string msg) { report.errors.push_back(std::move(msg)); };

  if (net.num_vertices <= 0) error("network has no vertices");
  if (!terminals_in_range(net)) {
    error("source or sink out of range");
  } else if (net.source == net.sink) {
    error("source and sink coincide");
  }
  for (EdgeId i = 0; i < net.num_edges(); ++i) {
    const auto& e = net.edges[i];
    const std::string tag = "edge " + std::to_string(i);
    if (e.tail < 0 || e.tail >= net.num_vertices || e.head < 0 || e.head >= net.num_vertices) {
      error(tag + ": endpoint out of range");
      continue;
    }
    if (e.tail == e.head) error(tag + ": self-loop");
    if (e.cost.slope < T(0) || e.cost.offset < T(0)) error(tag + ": negative coefficient");
    if (e.cost.slope == T(0) && e.cost.offset == T(0) && !e.cost.free) {
      error(tag + ": zero cost function not marked free");
    }
  }

  const auto& d = instance.states.demands;
  if (d.empty()) error("no states");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] <= T(0)) error("demand " + std::to_string(i) + " is not positive");
    if (i > 0 && d[i] <= d[i - 1]) error("demands are not strictly increasing");
  }
  if (!instance.states.labels.empty() && instance.states.labels.size() != d.size()) {
    error("state labels do not match demands");
  }
  if (!d.empty() && d.back() != T(1)) report.warnings.push_back("instance is not normalized");

  const auto& p = instance.prior.probabilities();
  if (p.size() != d.size()) {
    error("prior has " + std::to_string(p.size()) + " entries for " + std::to_string(d.size()) +
          " states");
  } else {
    T total{0};
    bool negative = false;
    for (const auto& v : p) {
      total += v;
      negative = negative || v < T(0);
    }
    if (negative) error("prior has a negative entry");
    if (abs_of(T(total - T(1))) > tolerance<T>(1e-12)) error("prior does not sum to one");
  }

  if (!report.valid()) return report;

  std::vector<std::pair<int, int>> arcs;
  for (const auto& e : net.edges) arcs.emplace_back(e.tail, e.head);
  if (!reach(net.num_vertices, arcs, net.source, true)[net.sink]) {
    error("sink is not reachable from source");
    return report;
  }
  report.dead_edges = dead_edges(net);
  if (!report.dead_edges.empty()) {
    report.warnings.push_back(std::to_string(report.dead_edges.size()) +
                              " edge(s) lie on no s-t walk");
  }
  return report;
}

template <Scalar T>
void require_valid(const Instance<T>& instance) {
  auto report = validate(instance);
  if (!report.valid()) throw ValidationError(report.summary());
}

template <Scalar T>
Instance<T> prune_dead_edges(const Instance<T>& instance, std::vector<EdgeId>* kept) {
  auto dead = dead_edges(instance.network);
  Instance<T> out = instance;
  out.network.edges.clear();
  if (kept) kept->clear();
  std::size_t k = 0;
  for (EdgeId i = 0; i < instance.network.num_edges(); ++i) {
    if (k < dead.size() && dead[k] == i) {
      ++k;
      continue;
    }
    out.network.edges.push_back(instance.network.edges[i]);
    if (kept) kept->push_back(i);
  }
  return out;
}

template <Scalar T>
Instance<T> normalize(const Instance<T>& instance) {
  if (instance.states.demands.empty()) throw ValidationError("no states");
  Instance<T> out = instance;
  const T D = instance.states.demands.back();
  if (D <= T(0)) throw ValidationError("largest demand is not positive");
  for (auto& d : out.states.demands) d /= D;
  for (auto& e : out.network.edges) e.cost.slope *= D;
  out.scale = instance.scale * D;
  return out;
}

#define DEMANDSIG_INSTANTIATE(T)                                                   \
  template class Belief<T>;                                                        \
  template T first_moment(const Belief<T>&, const StateSpace<T>&);                 \
  template T second_moment(const Belief<T>&, const StateSpace<T>&);                \
  template std::vector<EdgeId> dead_edges(const Network<T>&);                      \
  template ValidationReport validate(const Instance<T>&);                          \
  template void require_valid(const Instance<T>&);                                 \
  template Instance<T> prune_dead_edges(const Instance<T>&, std::vector<EdgeId>*); \
  template Instance<T> normalize(const Instance<T>&);

DEMANDSIG_INSTANTIATE(double)
DEMANDSIG_INSTANTIATE(Rational)

}  // namespace demandsig
