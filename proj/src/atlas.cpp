#include "demandsig/atlas.hpp"

#include "demandsig/instance_io.hpp"
#include "demandsig/lp.hpp"

#include <algorithm>
#include <ostream>

namespace demandsig {

template <Scalar T>
std::optional<SupportRange<T>> support_range(const Instance<T>& inst, const Support& support,
                                             const Tolerances& tol) {
  if (inst.states.size() != 2) throw ValidationError("support ranges need exactly two states");
  const auto& net = inst.network;
  const T d1 = inst.states.demands[0];
  const T d2 = inst.states.demands[1];

  lp::LinearProgram<T> prog;
  const int mu = prog.add_variable("mu", T(0), T(1));
  std::vector<int> y(net.num_edges(), -1);
  for (EdgeId e : support.edges) y[e] = prog.add_variable("y" + std::to_string(e));
  std::vector<int> pi(net.num_vertices, -1);
  for (VertexId v = 0; v < net.num_vertices; ++v) {
    if (v != net.source) pi[v] = prog.add_variable("pi" + std::to_string(v), std::nullopt);
  }
  for (EdgeId e = 0; e < net.num_edges(); ++e) {
    const auto& edge = net.edges[e];
    std::vector<lp::Term<T>> terms;
    if (pi[edge.tail] >= 0) terms.push_back({pi[edge.tail], T(1)});
    if (pi[edge.head] >= 0) terms.push_back({pi[edge.head], T(-1)});
    if (y[e] >= 0) terms.push_back({y[e], edge.cost.slope});
    terms.push_back({mu, edge.cost.offset * (d2 - d1)});
    prog.add_constraint(std::move(terms), y[e] >= 0 ? lp::Relation::Equal : lp::Relation::GreaterEqual,
                        -edge.cost.offset * d1);
  }
  for (VertexId v = 0; v < net.num_vertices; ++v) {
    if (v == net.source) continue;
    std::vector<lp::Term<T>> terms;
    for (EdgeId e : support.edges) {
      if (net.edges[e].head == v) terms.push_back({y[e], T(1)});
      if (net.edges[e].tail == v) terms.push_back({y[e], T(-1)});
    }
    T rhs{0};
    if (v == net.sink) {
      terms.push_back({mu, T(-(d2 * d2 - d1 * d1))});
      rhs = d1 * d1;
    }
    prog.add_constraint(std::move(terms), lp::Relation::Equal, rhs);
  }

  lp::Options opt;
  opt.feasibility_tol = tol.feasibility;
  opt.optimality_tol = tol.optimality;
  SupportRange<T> range;
  for (auto sense : {lp::Sense::Minimize, lp::Sense::Maximize}) {
    prog.set_objective(sense, {{mu, T(1)}});
    auto sol = lp::solve(prog, opt);
    if (sol.status == lp::Status::Infeasible) return std::nullopt;
    if (!sol.optimal()) {
      throw SolverError("support range LP " + std::string(lp::to_string(sol.status)) + " " +
                        sol.message);
    }
    const T& cost = sol.values[pi[net.sink]];
    if (sense == lp::Sense::Minimize) {
      range.lo = sol.objective;
      range.cost_lo = cost;
    } else {
      range.hi = sol.objective;
      range.cost_hi = cost;
    }
  }
  return range;
}

template <Scalar T>
PiecewiseLinearCost<T>::PiecewiseLinearCost(std::vector<AtlasSegment<T>> segments)
    : segments_(std::move(segments)) {}

template <Scalar T>
std::vector<T> PiecewiseLinearCost<T>::breakpoints() const {
  std::vector<T> out;
  for (const auto& s : segments_) out.push_back(s.lo);
  if (!segments_.empty()) out.push_back(segments_.back().hi);
  return out;
}

template <Scalar T>
std::vector<std::pair<T, T>> PiecewiseLinearCost<T>::vertices() const {
  std::vector<std::pair<T, T>> out;
  for (const auto& s : segments_) out.emplace_back(s.lo, s.value_at(s.lo));
  if (!segments_.empty()) {
    const auto& last = segments_.back();
    out.emplace_back(last.hi, last.value_at(last.hi));
  }
  return out;
}

template <Scalar T>
T PiecewiseLinearCost<T>::operator()(const T& mu) const {
  if (segments_.empty()) throw AtlasError("empty atlas");
  auto it = std::lower_bound(segments_.begin(), segments_.end(), mu,
                             [](const AtlasSegment<T>& s, const T& m) { return s.hi < m; });
  if (it == segments_.end()) it = std::prev(segments_.end());
  return it->value_at(mu);
}

template <Scalar T>
bool PiecewiseLinearCost<T>::is_concave(double tol) const {
  const T t = tolerance<T>(tol);
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (segments_[i].slope > segments_[i - 1].slope + t) return false;
  }
  return true;
}

template <Scalar T>
bool PiecewiseLinearCost<T>::is_linear(double tol) const {
  const T t = tolerance<T>(tol);
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (abs_of(T(segments_[i].slope - segments_[0].slope)) > t) return false;
  }
  return true;
}

namespace {

template <Scalar T>
void affine_model(const Instance<T>& inst, AtlasSegment<T>& seg, const SupportRange<T>& range,
                  const Tolerances& tol) {
  try {
    T c0 = solve_for_support(inst, Belief<T>::two_state(T(0)), seg.support, tol).flow.cost;
    T c1 = solve_for_support(inst, Belief<T>::two_state(T(1)), seg.support, tol).flow.cost;
    seg.intercept = c0;
    seg.slope = c1 - c0;
  } catch (const SupportError&) {
    seg.slope = (range.cost_hi - range.cost_lo) / (range.hi - range.lo);
    seg.intercept = range.cost_lo - seg.slope * range.lo;
  }
}

}  // namespace

template <Scalar T>
PiecewiseLinearCost<T> enumerate_supports(const Instance<T>& inst, const AtlasOptions& options) {
  if (inst.states.size() != 2) throw ValidationError("the atlas needs exactly two states");
  const Tolerances& tol = options.wardrop.tol;
  const T dedup = tolerance<T>(tol.breakpoint_dedup);
  const T member = tolerance<T>(tol.feasibility);
  const T floor = T(tol.width_floor);
  const T fractions[] = {ratio<T>(1, 2), ratio<T>(2, 5), ratio<T>(3, 5), ratio<T>(1, 3),
                         ratio<T>(2, 3), ratio<T>(1, 4), ratio<T>(3, 4)};

  std::vector<AtlasSegment<T>> segments;
  std::vector<std::pair<T, T>> pending{{T(0), T(1)}};
  while (!pending.empty()) {
    auto [lo, hi] = pending.back();
    pending.pop_back();
    if (hi - lo <= dedup) continue;
    if (hi - lo < floor) {
      throw AtlasError("uncovered belief interval [" + to_string(lo) + ", " + to_string(hi) +
                       "] is narrower than the width floor");
    }
    if (static_cast<int>(segments.size()) >= options.max_segments) {
      throw AtlasError("segment limit reached");
    }
    bool found = false;
    for (const T& f : fractions) {
      const T mu = lo + f * (hi - lo);
      auto flow = solve_wardrop(inst, Belief<T>::two_state(mu), options.wardrop);
      Support support = active_subnetwork(inst, flow, tol);
      auto range = support_range(inst, support, tol);
      if (!range || range->lo > mu + member || range->hi < mu - member) continue;
      if (range->hi - range->lo <= dedup) continue;
      AtlasSegment<T> seg;
      seg.lo = std::max(range->lo, lo);
      seg.hi = std::min(range->hi, hi);
      seg.support = std::move(support);
      affine_model(inst, seg, *range, tol);
      if (range->lo - lo > dedup) pending.emplace_back(lo, range->lo);
      if (hi - range->hi > dedup) pending.emplace_back(range->hi, hi);
      segments.push_back(std::move(seg));
      found = true;
      break;
    }
    if (!found) {
      throw AtlasError("no support found inside [" + to_string(lo) + ", " + to_string(hi) + "]");
    }
  }
  std::sort(segments.begin(), segments.end(),
            [](const auto& a, const auto& b) { return a.lo < b.lo; });
  segments.front().lo = T(0);
  segments.back().hi = T(1);
  for (std::size_t i = 1; i < segments.size(); ++i) segments[i].lo = segments[i - 1].hi;
  return PiecewiseLinearCost<T>(std::move(segments));
}

template <Scalar T>
std::vector<std::pair<T, T>> grid_oracle(const Instance<T>& inst, int resolution,
                                         const WardropOptions& options) {
  if (resolution < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<std::pair<T, T>> out;
  for (int i = 0; i < resolution; ++i) {
    T mu = ratio<T>(i, resolution - 1);
    out.emplace_back(mu, equilibrium_cost(inst, Belief<T>::two_state(mu), options));
  }
  return out;
}

template <Scalar T>
nlohmann::json atlas_to_json(const PiecewiseLinearCost<T>& atlas) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : atlas.segments()) {
    segs.push_back({{"lo", scalar_to_json(s.lo)},
                    {"hi", scalar_to_json(s.hi)},
                    {"intercept", scalar_to_json(s.intercept)},
                    {"slope", scalar_to_json(s.slope)},
                    {"support", s.support.edges}});
  }
  return {{"breakpoints", scalars_to_json(atlas.breakpoints())}, {"segments", segs}};
}

template <Scalar T>
void write_atlas_csv(std::ostream& out, const PiecewiseLinearCost<T>& atlas) {
  out << "lo,hi,intercept,slope,support\n";
  for (const auto& s : atlas.segments()) {
    out << to_string(s.lo) << ',' << to_string(s.hi) << ',' << to_string(s.intercept) << ','
        << to_string(s.slope) << ',';
    for (std::size_t i = 0; i < s.support.edges.size(); ++i) {
      out << (i ? " " : "") << s.support.edges[i];
    }
    out << '\n';
  }
}

#define DEMANDSIG_INSTANTIATE(T)                                                              \
  template std::optional<SupportRange<T>> support_range(const Instance<T>&, const Support&,    \
                                                        const Tolerances&);                    \
  template class PiecewiseLinearCost<T>;                                                      \
  template PiecewiseLinearCost<T> enumerate_supports(const Instance<T>&, const AtlasOptions&); \
  template std::vector<std::pair<T, T>> grid_oracle(const Instance<T>&, int,                   \
                                                    const WardropOptions&);                    \
  template nlohmann::json atlas_to_json(const PiecewiseLinearCost<T>&);                       \
  template void write_atlas_csv(std::ostream&, const PiecewiseLinearCost<T>&);

DEMANDSIG_INSTANTIATE(double)
DEMANDSIG_INSTANTIATE(Rational)

}  // namespace demandsig
