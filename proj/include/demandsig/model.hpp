#pragma once

#include "demandsig/scalar.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace demandsig {

using VertexId = int;
using EdgeId = int;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// c(x) = slope * x + offset. A zero-cost edge must be flagged `free`.
template <Scalar T>
struct AffineCost {
  T slope{0};
  T offset{0};
  bool free = false;

  T operator()(const T& load) const { return slope * load + offset; }
};

template <Scalar T>
struct Edge {
  VertexId tail = 0;
  VertexId head = 0;
  AffineCost<T> cost;
};

template <Scalar T>
struct Network {
  int num_vertices = 0;
  std::vector<Edge<T>> edges;
  VertexId source = -1;
  VertexId sink = -1;

  int num_edges() const { return static_cast<int>(edges.size()); }
};

/// Demand levels d_1 < ... < d_l; normalized instances have d_l = 1.
template <Scalar T>
struct StateSpace {
  std::vector<T> demands;
  std::vector<std::string> labels;

  std::size_t size() const { return demands.size(); }
};

template <Scalar T>
class Belief {
 public:
  Belief() = default;
  explicit Belief(std::vector<T> probabilities) : p_(std::move(probabilities)) {}

  static Belief point_mass(std::size_t num_states, std::size_t state);
  /// Two-state belief putting `high` on the second state.
  static Belief two_state(const T& high);

  std::size_t size() const { return p_.size(); }
  const T& operator[](std::size_t i) const { return p_[i]; }
  const std::vector<T>& probabilities() const { return p_; }
  /// Probability of the last state; the natural coordinate for two states.
  const T& high() const { return p_.back(); }
  bool is_point_mass() const;

 private:
  std::vector<T> p_;
};

template <Scalar T>
struct Instance {
  Network<T> network;
  StateSpace<T> states;
  Belief<T> prior;
  /// Factor D applied by normalize(); totals in original units are D times ours.
  T scale{1};
};

/// m1 = sum_theta mu_theta d_theta
template <Scalar T>
T first_moment(const Belief<T>& mu, const StateSpace<T>& states);

/// m2 = sum_theta mu_theta d_theta^2
template <Scalar T>
T second_moment(const Belief<T>& mu, const StateSpace<T>& states);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  std::vector<EdgeId> dead_edges;

  bool valid() const { return errors.empty(); }
  std::string summary() const;
};

template <Scalar T>
ValidationReport validate(const Instance<T>& instance);

/// Edges that lie on no s-t walk, plus edges entering s or leaving t.
template <Scalar T>
std::vector<EdgeId> dead_edges(const Network<T>& network);

/// Drops dead edges. `kept` receives the original id of every surviving edge.
template <Scalar T>
Instance<T> prune_dead_edges(const Instance<T>& instance, std::vector<EdgeId>* kept = nullptr);

/// Divides demands by D = d_l and multiplies slopes by D.
template <Scalar T>
Instance<T> normalize(const Instance<T>& instance);

/// Throws ValidationError with the report summary if invalid.
template <Scalar T>
void require_valid(const Instance<T>& instance);

template <Scalar To, Scalar From>
Instance<To> convert_instance(const Instance<From>& instance) {
  Instance<To> out;
  out.network.num_vertices = instance.network.num_vertices;
  out.network.source = instance.network.source;
  out.network.sink = instance.network.sink;
  for (const auto& e : instance.network.edges) {
    out.network.edges.push_back(
        {e.tail, e.head,
         {scalar_cast<To>(e.cost.slope), scalar_cast<To>(e.cost.offset), e.cost.free}});
  }
  for (const auto& d : instance.states.demands) out.states.demands.push_back(scalar_cast<To>(d));
  out.states.labels = instance.states.labels;
  std::vector<To> p;
  for (const auto& v : instance.prior.probabilities()) p.push_back(scalar_cast<To>(v));
  out.prior = Belief<To>(std::move(p));
  out.scale = scalar_cast<To>(instance.scale);
  return out;
}

}  // namespace demandsig
