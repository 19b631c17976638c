#pragma once

#include "demandsig/atlas.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <utility>
#include <vector>

namespace demandsig {

/// Joint distribution phi[state][signal] whose state marginal is the prior.
template <Scalar T>
class SignalingScheme {
 public:
  SignalingScheme() = default;
  SignalingScheme(std::vector<T> prior, std::vector<std::vector<T>> joint);

  std::size_t num_states() const { return prior_.size(); }
  std::size_t num_signals() const { return joint_.empty() ? 0 : joint_[0].size(); }
  const std::vector<T>& prior() const { return prior_; }
  const T& joint(std::size_t state, std::size_t signal) const { return joint_[state][signal]; }
  T mass(std::size_t signal) const;
  Belief<T> posterior(std::size_t signal) const;
  /// Signals sent with positive probability.
  std::vector<std::size_t> issued() const;
  /// Throws ValidationError when the marginal misses the prior.
  void check(double tol = 1e-9) const;

 private:
  std::vector<T> prior_;
  std::vector<std::vector<T>> joint_;
};

template <Scalar T>
T scheme_cost(const Instance<T>& instance, const SignalingScheme<T>& scheme,
              const WardropOptions& options = {});

template <Scalar T>
SignalingScheme<T> full_info_scheme(const Instance<T>& instance);

template <Scalar T>
SignalingScheme<T> no_signal_scheme(const Instance<T>& instance);

/// Two-state scheme splitting the prior into posteriors lo < prior < hi.
template <Scalar T>
SignalingScheme<T> split_scheme(const T& prior_high, const T& lo, const T& hi);

struct FptasOptions {
  std::size_t max_samples_per_side = 10000;
  WardropOptions wardrop;
};

template <Scalar T>
struct FptasResult {
  SignalingScheme<T> scheme;
  T cost{0};
  std::size_t samples_minus = 0;
  std::size_t samples_plus = 0;
  /// Sample count per side demanded by the accuracy bound.
  double required_samples = 0;
  bool truncated = false;
  int solver_calls = 0;
};

/// Geometric sampling towards the prior from both sides, then the best
/// two-point split (or no signal). Two-state instances only.
template <Scalar T>
FptasResult<T> fptas_two_states(const Instance<T>& instance, double eps,
                                const FptasOptions& options = {});

/// Lower convex hull of points sorted by x; collinear points are dropped.
template <Scalar T>
std::vector<std::pair<T, T>> lower_convex_envelope(std::vector<std::pair<T, T>> points);

template <Scalar T>
struct OptimalSchemeResult {
  SignalingScheme<T> scheme;
  T cost{0};
  std::vector<std::pair<T, T>> envelope;
};

/// Convex envelope of the exact cost curve, evaluated at the prior.
template <Scalar T>
OptimalSchemeResult<T> optimal_two_states(const Instance<T>& instance,
                                          const PiecewiseLinearCost<T>& atlas);

template <Scalar T>
OptimalSchemeResult<T> optimal_two_states(const Instance<T>& instance,
                                          const AtlasOptions& options = {});

template <Scalar T>
struct SupportLpResult {
  SignalingScheme<T> scheme;
  T cost{0};
  /// Index into the supplied supports for each signal of `scheme`.
  std::vector<std::size_t> support_of_signal;
};

/// Best scheme whose signals induce equilibria on the given supports, one
/// signal per support, solved as a single linear program.
template <Scalar T>
SupportLpResult<T> optimal_scheme_for_supports(const Instance<T>& instance,
                                               std::span<const Support> supports,
                                               const Tolerances& tol = {});

/// Merges signals with equal posteriors or nested supports when that does
/// not raise the cost, then keeps at most |states| signals.
template <Scalar T>
SignalingScheme<T> prune_signals(const SignalingScheme<T>& scheme, const Instance<T>& instance,
                                 const WardropOptions& options = {});

/// {signals:[{mass, posterior, support, cost}], total_cost}
template <Scalar T>
nlohmann::json scheme_to_json(const Instance<T>& instance, const SignalingScheme<T>& scheme,
                              const WardropOptions& options = {});

}  // namespace demandsig
