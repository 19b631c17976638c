#include "demandsig/signaling.hpp"

#include "demandsig/instance_io.hpp"
#include "demandsig/lp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>

namespace demandsig {

template <Scalar T>
SignalingScheme<T>::SignalingScheme(std::vector<T> prior, std::vector<std::vector<T>> joint)
    : prior_(std::move(prior)), joint_(std::move(joint)) {
  if (joint_.size() != prior_.size()) throw ValidationError("scheme rows do not match states");
  for (const auto& row : joint_) {
    if (row.size() != joint_[0].size()) throw ValidationError("ragged scheme");
  }
}

template <Scalar T>
T SignalingScheme<T>::mass(std::size_t signal) const {
  T m{0};
  for (const auto& row : joint_) m += row[signal];
  return m;
}

template <Scalar T>
Belief<T> SignalingScheme<T>::posterior(std::size_t signal) const {
  const T m = mass(signal);
  if (m <= T(0)) throw ValidationError("posterior of a signal that is never sent");
  std::vector<T> p;
  for (const auto& row : joint_) p.push_back(row[signal] / m);
  return Belief<T>(std::move(p));
}

template <Scalar T>
std::vector<std::size_t> SignalingScheme<T>::issued() const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < num_signals(); ++s) {
    if (mass(s) > T(0)) out.push_back(s);
  }
  return out;
}

template <Scalar T>
void SignalingScheme<T>::check(double tol) const {
  const T t = tolerance<T>(tol);
  for (std::size_t i = 0; i < joint_.size(); ++i) {
    T total{0};
    for (const auto& v : joint_[i]) {
      if (v < -t) throw ValidationError("negative scheme entry");
      total += v;
    }
    if (abs_of(T(total - prior_[i])) > t) throw ValidationError("scheme marginal misses the prior");
  }
}

template <Scalar T>
T scheme_cost(const Instance<T>& inst, const SignalingScheme<T>& scheme,
              const WardropOptions& options) {
  T total{0};
  for (auto s : scheme.issued()) {
    total += scheme.mass(s) * equilibrium_cost(inst, scheme.posterior(s), options);
  }
  return total;
}

template <Scalar T>
SignalingScheme<T> full_info_scheme(const Instance<T>& inst) {
  const auto& p = inst.prior.probabilities();
  std::vector<std::vector<T>> joint(p.size(), std::vector<T>(p.size(), T(0)));
  for (std::size_t i = 0; i < p.size(); ++i) joint[i][i] = p[i];
  return SignalingScheme<T>(p, std::move(joint));
}

template <Scalar T>
SignalingScheme<T> no_signal_scheme(const Instance<T>& inst) {
  const auto& p = inst.prior.probabilities();
  std::vector<std::vector<T>> joint;
  for (const auto& v : p) joint.push_back({v});
  return SignalingScheme<T>(p, std::move(joint));
}

template <Scalar T>
SignalingScheme<T> split_scheme(const T& prior_high, const T& lo, const T& hi) {
  if (!(lo <= prior_high && prior_high <= hi && lo < hi)) {
    throw ValidationError("split posteriors must bracket the prior");
  }
  const T w_hi = (prior_high - lo) / (hi - lo);
  const T w_lo = T(1) - w_hi;
  std::vector<std::vector<T>> joint = {{w_lo * (T(1) - lo), w_hi * (T(1) - hi)},
                                       {w_lo * lo, w_hi * hi}};
  return SignalingScheme<T>({T(1) - prior_high, prior_high}, std::move(joint));
}

namespace {

// Equilibrium cost on a fixed support is affine in mu in volume units, so a
// support found once answers every later query it stays feasible for.
template <Scalar T>
class CostSampler {
 public:
  CostSampler(const Instance<T>& inst, const WardropOptions& options)
      : inst_(inst), options_(options) {}

  T operator()(const T& mu) {
    for (auto it = models_.begin(); it != models_.end(); ++it) {
      if (auto c = evaluate(*it, mu)) {
        if (it != models_.begin()) std::rotate(models_.begin(), it, std::next(it));
        return *c;
      }
    }
    ++solver_calls;
    const auto belief = Belief<T>::two_state(mu);
    auto flow = solve_wardrop(inst_, belief, options_);
    try {
      models_.push_front(build(active_subnetwork(inst_, flow, options_.tol)));
      if (models_.size() > 64) models_.pop_back();
    } catch (const SupportError&) {
    }
    return flow.cost;
  }

  int solver_calls = 0;

 private:
  struct Model {
    Support support;
    std::vector<T> y0, y1;
    std::vector<T> pi0, pi1;
  };

  Model build(Support support) {
    Model m;
    const T m2_lo = inst_.states.demands[0] * inst_.states.demands[0];
    const T m2_hi = inst_.states.demands[1] * inst_.states.demands[1];
    auto s0 = solve_for_support(inst_, Belief<T>::two_state(T(0)), support, options_.tol);
    auto s1 = solve_for_support(inst_, Belief<T>::two_state(T(1)), support, options_.tol);
    for (EdgeId e : support.edges) {
      m.y0.push_back(s0.flow.load[e] * m2_lo);
      m.y1.push_back(s1.flow.load[e] * m2_hi);
    }
    m.pi0 = s0.flow.potential;
    m.pi1 = s1.flow.potential;
    m.support = std::move(support);
    return m;
  }

  std::optional<T> evaluate(const Model& m, const T& mu) const {
    const auto& net = inst_.network;
    const T m1 = (T(1) - mu) * inst_.states.demands[0] + mu * inst_.states.demands[1];
    const T load_tol = tolerance<T>(options_.tol.load);
    std::vector<T> cost(net.num_edges());
    for (EdgeId e = 0; e < net.num_edges(); ++e) cost[e] = net.edges[e].cost.offset * m1;
    for (std::size_t i = 0; i < m.support.edges.size(); ++i) {
      const T y = (T(1) - mu) * m.y0[i] + mu * m.y1[i];
      if (y < -load_tol) return std::nullopt;
      const EdgeId e = m.support.edges[i];
      cost[e] += net.edges[e].cost.slope * std::max(y, T(0));
    }
    auto dist = shortest_distances(net, std::span<const T>(cost));
    const T wardrop = tolerance<T>(options_.tol.wardrop);
    for (EdgeId e : m.support.edges) {
      for (VertexId v : {net.edges[e].tail, net.edges[e].head}) {
        const T pi = (T(1) - mu) * m.pi0[v] + mu * m.pi1[v];
        if (!dist[v] || *dist[v] < pi - wardrop) return std::nullopt;
      }
    }
    return (T(1) - mu) * m.pi0[net.sink] + mu * m.pi1[net.sink];
  }

  const Instance<T>& inst_;
  WardropOptions options_;
  std::deque<Model> models_;
};

template <Scalar T>
T cross(const std::pair<T, T>& o, const std::pair<T, T>& a, const std::pair<T, T>& b) {
  return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
}

// Index of the hull edge [k, k+1] whose x-range contains x.
template <Scalar T>
std::size_t hull_edge(const std::vector<std::pair<T, T>>& hull, const T& x) {
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    if (hull[k].first <= x && x <= hull[k + 1].first) return k;
  }
  throw SolverError("prior outside the sampled range");
}

template <Scalar T>
T interpolate(const std::pair<T, T>& a, const std::pair<T, T>& b, const T& x) {
  return a.second + (b.second - a.second) * (x - a.first) / (b.first - a.first);
}

template <Scalar T>
void require_two_states(const Instance<T>& inst) {
  if (inst.states.size() != 2) throw ValidationError("this method needs exactly two states");
}

std::uint64_t prior_denominator(const Rational& mu) {
  auto den = boost::multiprecision::denominator(mu);
  return den > 1000000000000ULL ? 1000000000000ULL : den.convert_to<std::uint64_t>();
}

std::uint64_t prior_denominator(double mu) {
  auto r = approximate_rational(mu, 1000000000, 1e-15);
  return boost::multiprecision::denominator(r).convert_to<std::uint64_t>();
}

}  // namespace

template <Scalar T>
std::vector<std::pair<T, T>> lower_convex_envelope(std::vector<std::pair<T, T>> points) {
  std::vector<std::pair<T, T>> hull;
  for (auto& p : points) {
    while (!hull.empty() && hull.back().first == p.first) {
      if (hull.back().second <= p.second) break;
      hull.pop_back();
    }
    if (!hull.empty() && hull.back().first == p.first) continue;
    // Samples crowd together near the prior, where the sign of a float cross
    // product is rounding noise; near-collinear triples are treated as turns.
    while (hull.size() >= 2) {
      const auto& o = hull[hull.size() - 2];
      const auto& a = hull.back();
      T slack{0};
      if constexpr (!is_exact_v<T>) {
        slack = 1e-12 * (std::abs(a.first - o.first) + std::abs(a.second - o.second)) *
                (std::abs(p.first - o.first) + std::abs(p.second - o.second));
      }
      if (cross(o, a, p) > slack) break;
      hull.pop_back();
    }
    hull.push_back(std::move(p));
  }
  return hull;
}

template <Scalar T>
FptasResult<T> fptas_two_states(const Instance<T>& inst, double eps, const FptasOptions& options) {
  require_two_states(inst);
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  FptasResult<T> result;
  const T mu_star = inst.prior.high();
  CostSampler<T> sampler(inst, options.wardrop);
  const T c_star = sampler(mu_star);
  if (inst.prior.is_point_mass()) {
    result.scheme = no_signal_scheme(inst);
    result.cost = c_star;
    result.solver_calls = sampler.solver_calls;
    return result;
  }

  const double delta = eps / 3.0;
  double big_b = 1.0;
  for (const auto& e : inst.network.edges) {
    big_b = std::max({big_b, std::abs(to_double(e.cost.slope)), std::abs(to_double(e.cost.offset))});
  }
  const double tau = inst.network.num_vertices + inst.network.num_edges();
  const double bound = std::log(static_cast<double>(prior_denominator(mu_star))) +
                       tau * std::log(big_b) + 0.5 * tau * std::log(tau);
  result.required_samples = std::ceil(bound / std::log1p(delta)) + 1;
  const std::size_t per_side =
      static_cast<std::size_t>(std::min<double>(result.required_samples, options.max_samples_per_side));
  result.truncated = result.required_samples > static_cast<double>(options.max_samples_per_side);

  std::vector<std::pair<T, T>> left, right;
  for (std::size_t j = 0; j <= per_side; ++j) {
    const T r = T(std::pow(1.0 + delta, -static_cast<double>(j)));
    const T q_lo = mu_star * (T(1) - r);
    const T q_hi = mu_star + (T(1) - mu_star) * r;
    if (q_lo < mu_star && (left.empty() || q_lo > left.back().first)) {
      left.emplace_back(q_lo, sampler(q_lo));
    }
    if (q_hi > mu_star && (right.empty() || q_hi < right.back().first)) {
      right.emplace_back(q_hi, sampler(q_hi));
    }
  }
  result.samples_minus = left.size();
  result.samples_plus = right.size();
  result.solver_calls = sampler.solver_calls;

  std::vector<std::pair<T, T>> points = left;
  points.insert(points.end(), right.rbegin(), right.rend());
  auto hull = lower_convex_envelope(points);
  const auto k = hull_edge(hull, mu_star);
  const T line = interpolate(hull[k], hull[k + 1], mu_star);
  if (c_star <= line) {
    result.scheme = no_signal_scheme(inst);
    result.cost = c_star;
  } else {
    result.scheme = split_scheme(mu_star, hull[k].first, hull[k + 1].first);
    result.cost = line;
  }
  return result;
}

template <Scalar T>
OptimalSchemeResult<T> optimal_two_states(const Instance<T>& inst,
                                          const PiecewiseLinearCost<T>& atlas) {
  require_two_states(inst);
  OptimalSchemeResult<T> result;
  const T mu_star = inst.prior.high();
  const T c_star = atlas(mu_star);
  result.envelope = lower_convex_envelope(atlas.vertices());
  const auto k = hull_edge(result.envelope, mu_star);
  const auto& a = result.envelope[k];
  const auto& b = result.envelope[k + 1];
  const T line = interpolate(a, b, mu_star);
  const T touch = tolerance<T>(1e-12) * (T(1) + abs_of(c_star));
  if (inst.prior.is_point_mass() || line >= c_star - touch || mu_star == a.first ||
      mu_star == b.first) {
    result.scheme = no_signal_scheme(inst);
    result.cost = std::min(c_star, line);
  } else {
    result.scheme = split_scheme(mu_star, a.first, b.first);
    result.cost = line;
  }
  return result;
}

template <Scalar T>
OptimalSchemeResult<T> optimal_two_states(const Instance<T>& inst, const AtlasOptions& options) {
  return optimal_two_states(inst, enumerate_supports(inst, options));
}

template <Scalar T>
SupportLpResult<T> optimal_scheme_for_supports(const Instance<T>& inst,
                                               std::span<const Support> supports,
                                               const Tolerances& tol) {
  const auto& net = inst.network;
  const auto& d = inst.states.demands;
  const std::size_t ns = d.size();
  const std::size_t k = supports.size();
  if (k == 0) throw ValidationError("no supports given");

  lp::LinearProgram<T> prog;
  std::vector<std::vector<int>> phi(ns, std::vector<int>(k));
  std::vector<std::vector<int>> y(k, std::vector<int>(net.num_edges(), -1));
  std::vector<std::vector<int>> tau(k, std::vector<int>(net.num_vertices, -1));
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t th = 0; th < ns; ++th) phi[th][s] = prog.add_variable({});
    for (EdgeId e : supports[s].edges) y[s][e] = prog.add_variable({});
    for (VertexId v = 0; v < net.num_vertices; ++v) {
      if (v != net.source) tau[s][v] = prog.add_variable({}, std::nullopt);
    }
  }
  for (std::size_t s = 0; s < k; ++s) {
    for (EdgeId e = 0; e < net.num_edges(); ++e) {
      const auto& edge = net.edges[e];
      std::vector<lp::Term<T>> terms;
      if (tau[s][edge.tail] >= 0) terms.push_back({tau[s][edge.tail], T(1)});
      if (tau[s][edge.head] >= 0) terms.push_back({tau[s][edge.head], T(-1)});
      if (y[s][e] >= 0) terms.push_back({y[s][e], edge.cost.slope});
      for (std::size_t th = 0; th < ns; ++th) terms.push_back({phi[th][s], edge.cost.offset * d[th]});
      prog.add_constraint(std::move(terms),
                          y[s][e] >= 0 ? lp::Relation::Equal : lp::Relation::GreaterEqual, T(0));
    }
    for (VertexId v = 0; v < net.num_vertices; ++v) {
      if (v == net.source) continue;
      std::vector<lp::Term<T>> terms;
      for (EdgeId e : supports[s].edges) {
        if (net.edges[e].head == v) terms.push_back({y[s][e], T(1)});
        if (net.edges[e].tail == v) terms.push_back({y[s][e], T(-1)});
      }
      if (v == net.sink) {
        for (std::size_t th = 0; th < ns; ++th) terms.push_back({phi[th][s], T(-(d[th] * d[th]))});
      }
      prog.add_constraint(std::move(terms), lp::Relation::Equal, T(0));
    }
  }
  for (std::size_t th = 0; th < ns; ++th) {
    std::vector<lp::Term<T>> terms;
    for (std::size_t s = 0; s < k; ++s) terms.push_back({phi[th][s], T(1)});
    prog.add_constraint(std::move(terms), lp::Relation::Equal, inst.prior[th]);
  }
  std::vector<lp::Term<T>> objective;
  for (std::size_t s = 0; s < k; ++s) objective.push_back({tau[s][net.sink], T(1)});
  prog.set_objective(lp::Sense::Minimize, std::move(objective));

  lp::Options opt;
  opt.feasibility_tol = tol.feasibility;
  opt.optimality_tol = tol.optimality;
  auto sol = lp::solve(prog, opt);
  if (!sol.optimal()) {
    throw SolverError("support LP " + std::string(lp::to_string(sol.status)) + " " + sol.message);
  }

  SupportLpResult<T> result;
  result.cost = sol.objective;
  const T zero = tolerance<T>(tol.feasibility);
  std::vector<std::vector<T>> joint(ns);
  for (std::size_t s = 0; s < k; ++s) {
    T mass{0};
    for (std::size_t th = 0; th < ns; ++th) mass += sol.values[phi[th][s]];
    if (mass <= zero) continue;
    for (std::size_t th = 0; th < ns; ++th) joint[th].push_back(std::max(sol.values[phi[th][s]], T(0)));
    result.support_of_signal.push_back(s);
  }
  result.scheme = SignalingScheme<T>(inst.prior.probabilities(), std::move(joint));
  return result;
}

template <Scalar T>
SignalingScheme<T> prune_signals(const SignalingScheme<T>& scheme, const Instance<T>& inst,
                                 const WardropOptions& options) {
  const std::size_t ns = scheme.num_states();
  const T same = tolerance<T>(options.tol.breakpoint_dedup);
  const T slack = tolerance<T>(options.tol.optimality);

  struct Signal {
    std::vector<T> joint;
    T mass;
    T cost;
    Support support;
  };
  auto make = [&](std::vector<T> joint) {
    Signal s{std::move(joint), T(0), T(0), {}};
    for (const auto& v : s.joint) s.mass += v;
    std::vector<T> p;
    for (const auto& v : s.joint) p.push_back(v / s.mass);
    auto flow = solve_wardrop(inst, Belief<T>(std::move(p)), options);
    s.cost = flow.cost;
    s.support = active_subnetwork(inst, flow, options.tol);
    return s;
  };
  auto close = [&](const Signal& a, const Signal& b) {
    for (std::size_t th = 0; th < ns; ++th) {
      if (abs_of(T(a.joint[th] / a.mass - b.joint[th] / b.mass)) > same) return false;
    }
    return true;
  };

  std::vector<Signal> signals;
  for (auto s : scheme.issued()) {
    std::vector<T> col;
    for (std::size_t th = 0; th < ns; ++th) col.push_back(scheme.joint(th, s));
    signals.push_back(make(std::move(col)));
  }

  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < signals.size() && !merged; ++i) {
      for (std::size_t j = 0; j < signals.size() && !merged; ++j) {
        if (i == j) continue;
        const bool nested = signals[i].support.subset_of(signals[j].support);
        if (!nested && !close(signals[i], signals[j])) continue;
        std::vector<T> col(ns);
        for (std::size_t th = 0; th < ns; ++th) col[th] = signals[i].joint[th] + signals[j].joint[th];
        Signal combined = make(std::move(col));
        const T before = signals[i].mass * signals[i].cost + signals[j].mass * signals[j].cost;
        if (combined.mass * combined.cost <= before + slack * (T(1) + abs_of(before))) {
          signals[i] = std::move(combined);
          signals.erase(signals.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
        }
      }
    }
  }

  if (signals.size() > ns) {
    // A basic solution of the mixing LP keeps at most |states| posteriors.
    lp::LinearProgram<T> prog;
    std::vector<int> w;
    for (std::size_t s = 0; s < signals.size(); ++s) w.push_back(prog.add_variable({}));
    for (std::size_t th = 0; th < ns; ++th) {
      std::vector<lp::Term<T>> terms;
      for (std::size_t s = 0; s < signals.size(); ++s) {
        terms.push_back({w[s], signals[s].joint[th] / signals[s].mass});
      }
      prog.add_constraint(std::move(terms), lp::Relation::Equal, scheme.prior()[th]);
    }
    std::vector<lp::Term<T>> objective;
    for (std::size_t s = 0; s < signals.size(); ++s) objective.push_back({w[s], signals[s].cost});
    prog.set_objective(lp::Sense::Minimize, std::move(objective));
    auto sol = lp::solve(prog);
    if (!sol.optimal()) throw SolverError("signal reduction LP failed");
    std::vector<Signal> kept;
    for (std::size_t s = 0; s < signals.size(); ++s) {
      if (sol.values[w[s]] <= tolerance<T>(options.tol.feasibility)) continue;
      const T scale = sol.values[w[s]] / signals[s].mass;
      for (auto& v : signals[s].joint) v *= scale;
      signals[s].mass = sol.values[w[s]];
      kept.push_back(std::move(signals[s]));
    }
    signals = std::move(kept);
  }

  std::sort(signals.begin(), signals.end(), [&](const Signal& a, const Signal& b) {
    return a.joint[ns - 1] / a.mass < b.joint[ns - 1] / b.mass;
  });
  std::vector<std::vector<T>> joint(ns);
  for (const auto& s : signals) {
    for (std::size_t th = 0; th < ns; ++th) joint[th].push_back(s.joint[th]);
  }
  return SignalingScheme<T>(scheme.prior(), std::move(joint));
}

template <Scalar T>
nlohmann::json scheme_to_json(const Instance<T>& inst, const SignalingScheme<T>& scheme,
                              const WardropOptions& options) {
  nlohmann::json signals = nlohmann::json::array();
  T total{0};
  for (auto s : scheme.issued()) {
    const auto belief = scheme.posterior(s);
    auto flow = solve_wardrop(inst, belief, options);
    const T mass = scheme.mass(s);
    total += mass * flow.cost;
    signals.push_back({{"mass", scalar_to_json(mass)},
                       {"posterior", scalars_to_json(belief.probabilities())},
                       {"support", active_subnetwork(inst, flow, options.tol).edges},
                       {"cost", scalar_to_json(flow.cost)}});
  }
  return {{"signals", signals}, {"total_cost", scalar_to_json(total)}};
}

#define DEMANDSIG_INSTANTIATE(T)                                                                  \
  template class SignalingScheme<T>;                                                              \
  template T scheme_cost(const Instance<T>&, const SignalingScheme<T>&, const WardropOptions&);   \
  template SignalingScheme<T> full_info_scheme(const Instance<T>&);                               \
  template SignalingScheme<T> no_signal_scheme(const Instance<T>&);                               \
  template SignalingScheme<T> split_scheme(const T&, const T&, const T&);                         \
  template FptasResult<T> fptas_two_states(const Instance<T>&, double, const FptasOptions&);      \
  template std::vector<std::pair<T, T>> lower_convex_envelope(std::vector<std::pair<T, T>>);      \
  template OptimalSchemeResult<T> optimal_two_states(const Instance<T>&,                          \
                                                     const PiecewiseLinearCost<T>&);              \
  template OptimalSchemeResult<T> optimal_two_states(const Instance<T>&, const AtlasOptions&);    \
  template SupportLpResult<T> optimal_scheme_for_supports(const Instance<T>&,                     \
                                                          std::span<const Support>,               \
                                                          const Tolerances&);                     \
  template SignalingScheme<T> prune_signals(const SignalingScheme<T>&, const Instance<T>&,        \
                                            const WardropOptions&);                               \
  template nlohmann::json scheme_to_json(const Instance<T>&, const SignalingScheme<T>&,           \
                                         const WardropOptions&);

DEMANDSIG_INSTANTIATE(double)
DEMANDSIG_INSTANTIATE(Rational)

}  // namespace demandsig
