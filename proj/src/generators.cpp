#include "demandsig/generators.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace demandsig {

namespace {

template <Scalar T>
Instance<T> uniform_two_state(Network<T> net, const T& low_demand) {
  Instance<T> inst;
  inst.network = std::move(net);
  inst.states.demands = {low_demand, T(1)};
  inst.prior = Belief<T>({ratio<T>(1, 2), ratio<T>(1, 2)});
  return inst;
}

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  int below(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }
  bool chance(int percent) { return below(100) < percent; }

 private:
  std::mt19937_64 rng_;
};

template <Scalar T>
AffineCost<T> random_cost(Draw& draw) {
  AffineCost<T> c;
  c.slope = draw.chance(20) ? T(0) : ratio<T>(1 + draw.below(12), 4);
  c.offset = ratio<T>(draw.below(13), 4);
  if (c.slope == T(0) && c.offset == T(0)) c.offset = ratio<T>(1, 4);
  return c;
}

template <Scalar T>
void nest(int depth, VertexId from, VertexId to, const T& slope_scale, const T& const_scale,
          const NestedBraessParams& p, Network<T>& net) {
  const VertexId v = net.num_vertices++;
  const VertexId w = net.num_vertices++;
  net.edges.push_back({from, v, {slope_scale, T(0)}});
  net.edges.push_back({v, to, {T(0), const_scale * ratio<T>(1, 2)}});
  net.edges.push_back({from, w, {T(0), const_scale * ratio<T>(1, 2)}});
  net.edges.push_back({w, to, {slope_scale, T(0)}});
  if (depth == 1) {
    net.edges.push_back({v, w, {T(0), const_scale * ratio<T>(1, 20)}});
    return;
  }
  const T kappa = ratio<T>(p.cost_num, p.cost_den);
  const T rho = ratio<T>(p.flow_num, p.flow_den);
  nest<T>(depth - 1, v, w, slope_scale * kappa / rho, const_scale * kappa, p, net);
}

}  // namespace

template <Scalar T>
Instance<T> two_link_example() {
  Network<T> net;
  net.num_vertices = 2;
  net.source = 0;
  net.sink = 1;
  net.edges.push_back({0, 1, {T(1), T(0)}});
  net.edges.push_back({0, 1, {T(0), ratio<T>(5, 6)}});
  return uniform_two_state(std::move(net), ratio<T>(1, 2));
}

template <Scalar T>
Instance<T> braess_example() {
  Network<T> net;
  net.num_vertices = 4;
  net.source = 0;
  net.sink = 3;
  net.edges.push_back({0, 1, {T(1), T(0)}});
  net.edges.push_back({1, 3, {T(0), ratio<T>(1, 2)}});
  net.edges.push_back({0, 2, {T(0), ratio<T>(1, 2)}});
  net.edges.push_back({2, 3, {T(1), T(0)}});
  net.edges.push_back({1, 2, {T(0), ratio<T>(1, 20)}});
  return uniform_two_state(std::move(net), ratio<T>(2, 5));
}

template <Scalar T>
Instance<T> nested_braess(int depth, const NestedBraessParams& params) {
  if (depth < 1) throw std::invalid_argument("nesting depth must be positive");
  Network<T> net;
  net.num_vertices = 2;
  net.source = 0;
  net.sink = 1;
  nest<T>(depth, 0, 1, T(1), T(1), params, net);
  return uniform_two_state(std::move(net),
                           ratio<T>(params.low_demand_num, params.low_demand_den));
}

template <Scalar T>
RandomSpInstance<T> random_series_parallel(std::uint64_t seed, int num_edges) {
  if (num_edges < 1) throw std::invalid_argument("need at least one edge");
  Draw draw(seed);
  Network<T> net;
  net.num_vertices = 2;
  net.source = 0;
  net.sink = 1;

  struct Builder {
    Draw& draw;
    Network<T>& net;
    SpNode build(int m, VertexId u, VertexId v) {
      if (m == 1) {
        net.edges.push_back({u, v, random_cost<T>(draw)});
        return SpNode::leaf(net.num_edges() - 1);
      }
      const int left = 1 + draw.below(m - 1);
      if (draw.chance(50)) {
        const VertexId mid = net.num_vertices++;
        auto a = build(left, u, mid);
        auto b = build(m - left, mid, v);
        return SpNode::series({std::move(a), std::move(b)});
      }
      auto a = build(left, u, v);
      auto b = build(m - left, u, v);
      return SpNode::parallel({std::move(a), std::move(b)});
    }
  };
  Builder builder{draw, net};
  SpNode script = builder.build(num_edges, 0, 1);
  auto inst = uniform_two_state(std::move(net), ratio<T>(1 + draw.below(9), 10));
  const T mu = ratio<T>(1 + draw.below(19), 20);
  inst.prior = Belief<T>::two_state(mu);
  return {std::move(inst), std::move(script)};
}

template <Scalar T>
Instance<T> random_two_state_instance(std::uint64_t seed, const RandomInstanceParams& params) {
  Draw draw(seed);
  const int n = 2 + draw.below(std::max(1, params.max_vertices - 1));
  Network<T> net;
  net.num_vertices = n;
  net.source = 0;
  net.sink = n - 1;

  // A random s-t path through a subset of the inner vertices keeps t reachable.
  std::vector<VertexId> inner(n - 2);
  std::iota(inner.begin(), inner.end(), 1);
  for (int i = static_cast<int>(inner.size()) - 1; i > 0; --i) {
    std::swap(inner[i], inner[draw.below(i + 1)]);
  }
  const int hops = draw.below(static_cast<int>(inner.size()) + 1);
  std::vector<VertexId> order{0};
  order.insert(order.end(), inner.begin(), inner.begin() + std::min<int>(hops, params.max_edges - 1));
  order.push_back(n - 1);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    net.edges.push_back({order[i], order[i + 1], random_cost<T>(draw)});
  }
  const int target = net.num_edges() + draw.below(params.max_edges - net.num_edges() + 1);
  while (net.num_edges() < target) {
    VertexId u = draw.below(n);
    VertexId v = draw.below(n);
    if (u == v || v == 0 || u == n - 1) continue;
    net.edges.push_back({u, v, random_cost<T>(draw)});
  }

  auto inst = uniform_two_state(std::move(net), ratio<T>(1 + draw.below(9), 10));
  inst.prior = Belief<T>::two_state(ratio<T>(1 + draw.below(19), 20));
  return prune_dead_edges(inst);
}

#define DEMANDSIG_INSTANTIATE(T)                                                 \
  template Instance<T> two_link_example<T>();                                    \
  template Instance<T> braess_example<T>();                                      \
  template Instance<T> nested_braess<T>(int, const NestedBraessParams&);         \
  template RandomSpInstance<T> random_series_parallel<T>(std::uint64_t, int);    \
  template Instance<T> random_two_state_instance<T>(std::uint64_t, const RandomInstanceParams&);

DEMANDSIG_INSTANTIATE(double)
DEMANDSIG_INSTANTIATE(Rational)

}  // namespace demandsig
