#pragma once

#include "demandsig/model.hpp"
#include "demandsig/series_parallel.hpp"

#include <cstdint>

namespace demandsig {

/// Two parallel links, x and constant 5/6; demands (1/2, 1), uniform prior.
template <Scalar T>
Instance<T> two_link_example();

/// Braess graph s, v, w, t with costs x, 1/2, 1/2, x and a 1/20 cross link;
/// demands (2/5, 1), uniform prior.
template <Scalar T>
Instance<T> braess_example();

struct NestedBraessParams {
  /// Cost multiplier applied to each nested copy.
  std::int64_t cost_num = 1, cost_den = 10;
  /// Throughput multiplier applied to each nested copy.
  std::int64_t flow_num = 2, flow_den = 5;
  std::int64_t low_demand_num = 2, low_demand_den = 5;
};

/// Depth-n recursion: the cross link of the Braess gadget is replaced by a
/// rescaled depth-(n-1) copy. 2n + 2 vertices, 4n + 1 edges.
template <Scalar T>
Instance<T> nested_braess(int depth, const NestedBraessParams& params = {});

template <Scalar T>
struct RandomSpInstance {
  Instance<T> instance;
  /// Composition used to build the network.
  SpNode script;
};

template <Scalar T>
RandomSpInstance<T> random_series_parallel(std::uint64_t seed, int num_edges);

struct RandomInstanceParams {
  int max_vertices = 10;
  int max_edges = 15;
};

/// Random two-state instance with small rational coefficients, dead edges pruned.
template <Scalar T>
Instance<T> random_two_state_instance(std::uint64_t seed, const RandomInstanceParams& params = {});

}  // namespace demandsig
