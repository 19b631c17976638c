#pragma once

#include "demandsig/wardrop.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace demandsig {

class AtlasError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Beliefs (as the probability of the high state) at which a support is an
/// equilibrium support, with the equilibrium cost at both ends.
template <Scalar T>
struct SupportRange {
  T lo{0};
  T hi{0};
  T cost_lo{0};
  T cost_hi{0};
};

/// Min and max of mu over the support polytope; nullopt when it is empty.
/// Two-state instances only.
template <Scalar T>
std::optional<SupportRange<T>> support_range(const Instance<T>& instance, const Support& support,
                                             const Tolerances& tol = {});

template <Scalar T>
struct AtlasSegment {
  T lo{0};
  T hi{0};
  T intercept{0};
  T slope{0};
  Support support;

  T value_at(const T& mu) const { return intercept + slope * mu; }
};

template <Scalar T>
class PiecewiseLinearCost {
 public:
  PiecewiseLinearCost() = default;
  explicit PiecewiseLinearCost(std::vector<AtlasSegment<T>> segments);

  const std::vector<AtlasSegment<T>>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  std::vector<T> breakpoints() const;
  /// Cost at each breakpoint, taken from the segment to its right (left at 1).
  std::vector<std::pair<T, T>> vertices() const;
  T operator()(const T& mu) const;
  bool is_concave(double tol) const;
  bool is_linear(double tol) const;

 private:
  std::vector<AtlasSegment<T>> segments_;
};

struct AtlasOptions {
  WardropOptions wardrop;
  int max_segments = 100000;
};

/// Sweeps [0, 1], discovering each support from an equilibrium inside an
/// uncovered interval and removing its range.
template <Scalar T>
PiecewiseLinearCost<T> enumerate_supports(const Instance<T>& instance,
                                          const AtlasOptions& options = {});

/// C at resolution equally spaced beliefs, endpoints included.
template <Scalar T>
std::vector<std::pair<T, T>> grid_oracle(const Instance<T>& instance, int resolution,
                                         const WardropOptions& options = {});

template <Scalar T>
nlohmann::json atlas_to_json(const PiecewiseLinearCost<T>& atlas);

template <Scalar T>
void write_atlas_csv(std::ostream& out, const PiecewiseLinearCost<T>& atlas);

}  // namespace demandsig
