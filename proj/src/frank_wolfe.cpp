#include "demandsig/wardrop.hpp"

#include <algorithm>
#include <cmath>

namespace demandsig {

namespace {

// All-or-nothing assignment of `volume` onto a shortest s-t path.
std::vector<double> all_or_nothing(const Network<double>& net, const std::vector<double>& cost,
                                   double volume) {
  auto dist = shortest_distances(net, std::span<const double>(cost));
  if (!dist[net.sink]) throw SolverError("sink unreachable");
  std::vector<double> target(net.num_edges(), 0.0);
  VertexId v = net.sink;
  while (v != net.source) {
    EdgeId pred = -1;
    for (EdgeId e = 0; e < net.num_edges(); ++e) {
      const auto& edge = net.edges[e];
      if (edge.head != v || !dist[edge.tail]) continue;
      double slack = *dist[edge.tail] + cost[e] - *dist[v];
      if (std::abs(slack) <= 1e-12 * (1.0 + std::abs(*dist[v])) &&
          (pred < 0 || *dist[edge.tail] < *dist[net.edges[pred].tail])) {
        pred = e;
      }
    }
    if (pred < 0) throw SolverError("broken shortest path tree");
    target[pred] = volume;
    v = net.edges[pred].tail;
  }
  return target;
}

}  // namespace

// Conjugate Frank-Wolfe on the Beckmann objective in volume units y = m2 x.
Flow<double> solve_wardrop_frank_wolfe(const Instance<double>& inst, const Belief<double>& mu,
                                       const WardropOptions& options, FrankWolfeReport* report) {
  const auto& net = inst.network;
  const int ne = net.num_edges();
  const double m1 = first_moment(mu, inst.states);
  const double m2 = second_moment(mu, inst.states);
  std::vector<double> a(ne), b(ne);
  for (EdgeId e = 0; e < ne; ++e) {
    a[e] = net.edges[e].cost.slope;
    b[e] = net.edges[e].cost.offset * m1;
  }
  auto gradient = [&](const std::vector<double>& y) {
    std::vector<double> g(ne);
    for (EdgeId e = 0; e < ne; ++e) g[e] = a[e] * y[e] + b[e];
    return g;
  };

  std::vector<double> y = all_or_nothing(net, b, m2);
  std::vector<double> conj;
  FrankWolfeReport rep;
  for (; rep.iterations < options.max_iterations; ++rep.iterations) {
    auto g = gradient(y);
    auto s = all_or_nothing(net, g, m2);
    double gy = 0, gap = 0;
    for (EdgeId e = 0; e < ne; ++e) {
      gy += g[e] * y[e];
      gap += g[e] * (y[e] - s[e]);
    }
    rep.relative_gap = gy > 0 ? gap / gy : 0.0;
    if (rep.relative_gap <= options.relative_gap) break;

    std::vector<double> dir(ne);
    if (!conj.empty()) {
      double num = 0, den = 0;
      for (EdgeId e = 0; e < ne; ++e) {
        num += a[e] * (conj[e] - y[e]) * (s[e] - y[e]);
        den += a[e] * (conj[e] - y[e]) * (s[e] - conj[e]);
      }
      double alpha = den != 0 ? num / den : 0.0;
      alpha = std::clamp(alpha, 0.0, 1.0 - 1e-7);
      for (EdgeId e = 0; e < ne; ++e) s[e] = alpha * conj[e] + (1 - alpha) * s[e];
    }
    double slope = 0, curvature = 0;
    for (EdgeId e = 0; e < ne; ++e) {
      dir[e] = s[e] - y[e];
      slope += g[e] * dir[e];
      curvature += a[e] * dir[e] * dir[e];
    }
    if (slope >= 0) {
      conj.clear();
      continue;
    }
    double step = curvature > 0 ? std::min(1.0, -slope / curvature) : 1.0;
    for (EdgeId e = 0; e < ne; ++e) y[e] += step * dir[e];
    conj = s;
  }

  std::vector<double> load(ne);
  for (EdgeId e = 0; e < ne; ++e) load[e] = y[e] / m2;
  Flow<double> flow = flow_from_loads(inst, mu, load);
  if (options.project) {
    Support used;
    for (EdgeId e = 0; e < ne; ++e) {
      if (load[e] > 1e-9) used.edges.push_back(e);
    }
    for (const auto& candidate : {used, active_subnetwork(inst, flow, options.tol)}) {
      try {
        auto proj = solve_for_support(inst, mu, candidate, options.tol);
        if (proj.feasible()) {
          rep.projected = true;
          flow = proj.flow;
          break;
        }
      } catch (const SupportError&) {
      }
    }
  }
  if (report) *report = rep;
  return flow;
}

}  // namespace demandsig
