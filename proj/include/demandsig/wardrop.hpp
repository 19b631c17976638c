#pragma once

#include "demandsig/model.hpp"

#include <compare>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace demandsig {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The support system of a candidate edge set is singular or the set does
/// not form an s-t network.
class SupportError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Sorted set of edge ids.
struct Support {
  std::vector<EdgeId> edges;

  bool contains(EdgeId e) const;
  bool subset_of(const Support& other) const;
  std::size_t size() const { return edges.size(); }
  std::string str() const;
  auto operator<=>(const Support&) const = default;
};

/// Population shares x_e and shortest-path potentials, with C = pi_t.
template <Scalar T>
struct Flow {
  Belief<T> belief;
  std::vector<T> load;
  std::vector<T> potential;
  T cost{0};
};

enum class EquilibriumMethod { Pivoting, FrankWolfe };

struct WardropOptions {
  EquilibriumMethod method = EquilibriumMethod::Pivoting;
  Tolerances tol;
  int max_iterations = 15000;
  double relative_gap = 1e-13;
  /// Re-solve the support system of an approximate flow to remove drift.
  bool project = true;
};

/// c_e(x | mu) = a_e m2 x + b_e m1
template <Scalar T>
T expected_edge_cost(const AffineCost<T>& cost, const T& load, const Belief<T>& mu,
                     const StateSpace<T>& states);

/// m2 / m1
template <Scalar T>
T virtual_demand(const Belief<T>& mu, const StateSpace<T>& states);

/// Deterministic equilibrium routing `volume` with edge costs slope*y + offset.
template <Scalar T>
struct RoutedFlow {
  std::vector<T> volume;
  std::vector<T> potential;
};

template <Scalar T>
RoutedFlow<T> route_equilibrium(const Network<T>& network, std::span<const T> slope,
                                 std::span<const T> offset, const T& volume);

/// Dijkstra from the source; costs must be nonnegative. Unreachable vertices get nullopt.
template <Scalar T>
std::vector<std::optional<T>> shortest_distances(const Network<T>& network,
                                                 std::span<const T> edge_cost);

template <Scalar T>
Flow<T> solve_wardrop(const Instance<T>& instance, const Belief<T>& mu,
                      const WardropOptions& options = {});

template <Scalar T>
T equilibrium_cost(const Instance<T>& instance, const Belief<T>& mu,
                   const WardropOptions& options = {});

/// Every edge whose cost closes the potential gap: pi_v + c_e = pi_w.
template <Scalar T>
Support active_support(const Instance<T>& instance, const Flow<T>& flow,
                       const Tolerances& tol = {});

/// Tight edges lying on an s-t path made of tight edges.
template <Scalar T>
Support active_subnetwork(const Instance<T>& instance, const Flow<T>& flow,
                          const Tolerances& tol = {});

template <Scalar T>
struct SupportSolution {
  Flow<T> flow;
  bool negative_load = false;
  bool profitable_deviation = false;

  bool feasible() const { return !negative_load && !profitable_deviation; }
};

/// Solves the linear system in which every edge of A is tight and carries
/// the flow, then flags sign and deviation violations.
template <Scalar T>
SupportSolution<T> solve_for_support(const Instance<T>& instance, const Belief<T>& mu,
                                     const Support& support, const Tolerances& tol = {});

/// min sum_e y_e (a_e y_e + b_e) routing `demand`, via marginal-cost equilibrium.
template <Scalar T>
T system_optimum(const Instance<T>& instance, const T& demand);

struct FrankWolfeReport {
  int iterations = 0;
  double relative_gap = 0;
  bool projected = false;
};

Flow<double> solve_wardrop_frank_wolfe(const Instance<double>& instance, const Belief<double>& mu,
                                       const WardropOptions& options,
                                       FrankWolfeReport* report = nullptr);

/// Shortest-path potentials and cost for a given load vector.
template <Scalar T>
Flow<T> flow_from_loads(const Instance<T>& instance, const Belief<T>& mu, std::vector<T> load);

}  // namespace demandsig
