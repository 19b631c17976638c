#include "demandsig/study.hpp"

#include "demandsig/signaling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <random>
#include <set>
#include <thread>

namespace demandsig {

namespace {

StudyRow solve_row(const Network<double>& base, int s, int t, const StudyConfig& cfg) {
  StudyRow row;
  row.s = s;
  row.t = t;
  try {
    Instance<double> raw;
    raw.network = base;
    raw.network.source = s;
    raw.network.sink = t;
    raw.states.demands = {cfg.rho * cfg.demand, cfg.demand};
    raw.prior = Belief<double>::two_state(cfg.prior_high);
    require_valid(raw);
    auto inst = normalize(prune_dead_edges(raw));

    auto atlas = enumerate_supports(inst, cfg.atlas);
    const double mu = cfg.prior_high;
    const double D = inst.scale;
    row.num_supports = atlas.size();
    for (const auto& bp : atlas.breakpoints()) {
      if (bp > 0 && bp < 1) row.breakpoints.push_back(bp);
    }
    row.c_fi = D * ((1 - mu) * atlas(0.0) + mu * atlas(1.0));
    row.c_no = D * atlas(mu);
    row.c_opt = D * optimal_two_states(inst, atlas).cost;
    row.c_pso = D * ((1 - mu) * system_optimum(inst, inst.states.demands[0]) +
                     mu * system_optimum(inst, inst.states.demands[1]));
    row.linear = atlas.is_linear(cfg.classify_tol);
    row.concave = !row.linear && atlas.is_concave(cfg.classify_tol);
    row.ok = true;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

StudyAggregates aggregate(const std::vector<StudyRow>& rows, double tol) {
  StudyAggregates agg;
  std::vector<double> counts;
  std::size_t conc = 0, lin = 0, fi_opt = 0;
  for (const auto& r : rows) {
    if (!r.ok) continue;
    counts.push_back(static_cast<double>(r.num_supports));
    agg.supports_max = std::max(agg.supports_max, r.num_supports);
    conc += r.concave;
    lin += r.linear;
    fi_opt += r.c_fi <= r.c_opt + tol * std::max(1.0, std::abs(r.c_opt));
    agg.fi_over_opt += r.c_fi / r.c_opt;
    agg.no_over_opt += r.c_no / r.c_opt;
    agg.opt_over_pso += r.c_opt / r.c_pso;
    agg.we_over_pso += r.c_no / r.c_pso;
  }
  agg.completed = counts.size();
  if (counts.empty()) return agg;
  const double n = static_cast<double>(counts.size());
  for (double c : counts) agg.supports_mean += c / n;
  if (counts.size() > 1) {
    double ss = 0;
    for (double c : counts) ss += (c - agg.supports_mean) * (c - agg.supports_mean);
    agg.supports_sd = std::sqrt(ss / (n - 1));
  }
  agg.concave_pct = 100.0 * static_cast<double>(conc) / n;
  agg.linear_pct = 100.0 * static_cast<double>(lin) / n;
  agg.fi_optimal_pct = 100.0 * static_cast<double>(fi_opt) / n;
  agg.fi_over_opt /= n;
  agg.no_over_opt /= n;
  agg.opt_over_pso /= n;
  agg.we_over_pso /= n;
  return agg;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

ExperimentResult run_study(const Network<double>& network, int num_zones, const StudyConfig& cfg) {
  if (num_zones < 2 || num_zones > network.num_vertices) {
    throw ValidationError("need at least two zones within the node range");
  }
  if (!(cfg.rho > 0 && cfg.rho < 1)) throw ValidationError("rho must lie in (0, 1)");
  if (!(cfg.prior_high > 0 && cfg.prior_high < 1)) throw ValidationError("prior must lie in (0, 1)");
  if (!(cfg.demand > 0)) throw ValidationError("demand must be positive");
  const long long pairs = static_cast<long long>(num_zones) * (num_zones - 1);
  if (cfg.instances < 1 || cfg.instances > pairs) {
    throw ValidationError("instance count must lie in 1.." + std::to_string(pairs));
  }

  std::mt19937_64 rng(cfg.seed);
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> draws;
  while (static_cast<int>(draws.size()) < cfg.instances) {
    int s = static_cast<int>(rng() % static_cast<std::uint64_t>(num_zones));
    int t = static_cast<int>(rng() % static_cast<std::uint64_t>(num_zones));
    if (s == t || !seen.emplace(s, t).second) continue;
    draws.emplace_back(s, t);
  }

  unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  ExperimentResult result;
  result.rows.resize(draws.size());
  for (std::size_t start = 0; start < draws.size(); start += workers) {
    std::vector<std::future<StudyRow>> batch;
    for (std::size_t i = start; i < std::min(draws.size(), start + workers); ++i) {
      batch.push_back(std::async(std::launch::async, solve_row, std::cref(network), draws[i].first,
                                 draws[i].second, std::cref(cfg)));
    }
    for (std::size_t k = 0; k < batch.size(); ++k) result.rows[start + k] = batch[k].get();
  }
  result.aggregates = aggregate(result.rows, cfg.classify_tol);
  return result;
}

void write_study_rows_csv(std::ostream& out, const ExperimentResult& result) {
  out << "s,t,supports,breakpoints,C_FI,C_NO,C_OPT,C_PSO,concave,linear,error\n";
  for (const auto& r : result.rows) {
    out << r.s + 1 << ',' << r.t + 1 << ',';
    if (!r.ok) {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out << ",,,,,,,," << msg << '\n';
      continue;
    }
    out << r.num_supports << ',';
    for (std::size_t i = 0; i < r.breakpoints.size(); ++i) {
      out << (i ? ";" : "") << fmt(r.breakpoints[i]);
    }
    out << ',' << fmt(r.c_fi) << ',' << fmt(r.c_no) << ',' << fmt(r.c_opt) << ',' << fmt(r.c_pso)
        << ',' << (r.concave ? 1 : 0) << ',' << (r.linear ? 1 : 0) << ",\n";
  }
}

void write_study_summary_csv(std::ostream& out, const ExperimentResult& result) {
  const auto& a = result.aggregates;
  out << "instances,AV,SD,MAX,conc_pct,lin_pct,FI_opt_pct,FI_over_OPT,NO_over_OPT,OPT_over_PSO,"
         "WE_over_PSO\n";
  out << a.completed << ',' << fmt(a.supports_mean) << ',' << fmt(a.supports_sd) << ','
      << a.supports_max << ',' << fmt(a.concave_pct) << ',' << fmt(a.linear_pct) << ','
      << fmt(a.fi_optimal_pct) << ',' << fmt(a.fi_over_opt) << ',' << fmt(a.no_over_opt) << ','
      << fmt(a.opt_over_pso) << ',' << fmt(a.we_over_pso) << '\n';
}

}  // namespace demandsig
