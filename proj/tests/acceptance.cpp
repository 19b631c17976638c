// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "demandsig/generators.hpp"
#include "demandsig/series_parallel.hpp"
#include "demandsig/signaling.hpp"
#include "demandsig/study.hpp"
#include "demandsig/tntp.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace demandsig;

namespace {

constexpr int kCorpusSize = 200;
constexpr int kSpCount = 50;

Rational R(long p, long q = 1) { return Rational(p) / Rational(q); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

const std::vector<Instance<double>>& corpus() {
  static const auto instances = [] {
    std::vector<Instance<double>> out;
    for (int seed = 1; seed <= kCorpusSize; ++seed) out.push_back(random_two_state_instance<double>(seed));
    return out;
  }();
  return instances;
}

const std::vector<Instance<double>>& sp_corpus() {
  static const auto instances = [] {
    std::vector<Instance<double>> out;
    for (int seed = 1; seed <= kSpCount; ++seed) {
      out.push_back(random_series_parallel<double>(1000 + seed, 2 + seed % 11).instance);
    }
    return out;
  }();
  return instances;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

template <Scalar T>
Instance<T> with_prior(Instance<T> inst, const T& high) {
  inst.prior = Belief<T>::two_state(high);
  return inst;
}

Outcome two_link_goldens() {
  Outcome o;
  Clock clock;
  {
    auto inst = two_link_example<Rational>();
    auto atlas = enumerate_supports(inst);
    o.require(atlas(R(0)) == R(1, 4), "C(0)");
    o.require(atlas(R(1, 2)) == R(5, 8), "C(1/2)");
    o.require(atlas(R(1)) == R(5, 6), "C(1)");
    o.require(equilibrium_cost(inst, inst.prior) == R(5, 8), "solver C(1/2)");
    o.require(scheme_cost(inst, no_signal_scheme(inst)) == R(5, 8), "no-signal");
    o.require(scheme_cost(inst, full_info_scheme(inst)) == R(13, 24), "full-info");
    o.require(atlas.breakpoints() == std::vector<Rational>{R(0), R(1, 2), R(1)}, "breakpoints");
  }
  {
    auto inst = two_link_example<double>();
    auto atlas = enumerate_supports(inst);
    auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9; };
    o.require(near(atlas(0.0), 0.25), "float C(0)");
    o.require(near(atlas(0.5), 0.625), "float C(1/2)");
    o.require(near(atlas(1.0), 5.0 / 6), "float C(1)");
    o.require(near(scheme_cost(inst, no_signal_scheme(inst)), 0.625), "float no-signal");
    o.require(near(scheme_cost(inst, full_info_scheme(inst)), 13.0 / 24), "float full-info");
    const auto bp = atlas.breakpoints();
    o.require(bp.size() == 3 && near(bp[1], 0.5), "float breakpoints");
  }
  const double t = clock.seconds();
  o.require(t < 1.0, "runtime");
  o.detail += (o.detail.empty() ? "" : "; ") + fmt("%.3f s", t);
  return o;
}

Outcome braess_goldens() {
  Outcome o;
  Clock clock;
  auto inst = braess_example<Rational>();
  auto atlas = enumerate_supports(inst);
  o.require(atlas.breakpoints() == std::vector<Rational>{R(0), R(2, 57), R(2, 3), R(1)}, "breakpoints");
  o.require(atlas(R(0)) == R(17, 50), "C(0)");
  o.require(atlas(R(2, 57)) == R(2, 5), "C(2/57)");
  o.require(atlas(R(2, 3)) == R(19, 25), "C(2/3)");
  o.require(atlas(R(1)) == 1, "C(1)");
  auto opt = optimal_two_states(inst, atlas);
  o.require(opt.cost == R(131, 200), "optimal cost");
  o.require(scheme_cost(inst, opt.scheme) == R(131, 200), "optimal scheme cost");
  const auto& s = opt.scheme;
  o.require(s.num_signals() == 2, "signal count");
  if (s.num_signals() == 2) {
    o.require(s.posterior(0).high() == 0 && s.posterior(1).high() == R(2, 3), "posteriors");
    o.require(s.joint(0, 0) == R(1, 4) && s.joint(0, 1) == R(1, 4) && s.joint(1, 0) == 0 &&
                  s.joint(1, 1) == R(1, 2),
              "joint distribution");
  }
  o.require(scheme_cost(inst, no_signal_scheme(inst)) == R(133, 200), "no-signal");
  o.require(scheme_cost(inst, full_info_scheme(inst)) == R(134, 200), "full-info");
  const double t = clock.seconds();
  o.require(t < 1.0, "runtime");
  o.detail += (o.detail.empty() ? "" : "; ") + fmt("%.3f s", t);
  return o;
}

Outcome fptas_guarantee() {
  Outcome o;
  Clock clock;
  const std::vector<double> eps{0.5, 0.1, 0.01};
  std::vector<Instance<double>> cases{braess_example<double>()};
  cases.insert(cases.end(), corpus().begin(), corpus().end());
  double worst = 0;
  std::size_t truncated = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const double opt = optimal_two_states(cases[i]).cost;
    for (double e : eps) {
      auto r = fptas_two_states(cases[i], e);
      truncated += r.truncated;
      worst = std::max(worst, r.cost / opt - 1);
      o.require(r.cost <= (1 + e) * opt, "instance " + std::to_string(i) + " eps " + fmt("%g", e));
    }
  }
  const double braess = fptas_two_states(braess_example<double>(), 0.01).cost;
  o.require(std::abs(braess - 0.655) <= 0.01 * 0.655, "Braess eps 0.01 within 1% of 131/200");
  const double t = clock.seconds();
  o.require(t < 60.0, "runtime");
  o.detail += (o.detail.empty() ? "" : "; ") + fmt("worst ratio-1 %.2e", worst) + ", " +
              std::to_string(truncated) + " truncated, " + fmt("%.1f s", t);
  return o;
}

Outcome support_lp_equivalence() {
  Outcome o;
  Clock clock;
  double worst = 0;
  for (std::size_t i = 0; i < corpus().size(); ++i) {
    const auto& inst = corpus()[i];
    auto atlas = enumerate_supports(inst);
    std::set<Support> distinct;
    for (const auto& s : atlas.segments()) distinct.insert(s.support);
    std::vector<Support> sups(distinct.begin(), distinct.end());
    const double lp = optimal_scheme_for_supports(inst, std::span<const Support>(sups)).cost;
    const double env = optimal_two_states(inst, atlas).cost;
    worst = std::max(worst, std::abs(lp - env));
    o.require(std::abs(lp - env) <= 1e-9, "instance " + std::to_string(i));
  }
  o.detail += (o.detail.empty() ? "" : "; ") + fmt("max |LP - envelope| %.2e", worst) + ", " +
              fmt("%.1f s", clock.seconds());
  return o;
}

Outcome series_parallel_full_info() {
  Outcome o;
  Clock clock;
  double worst = 0;
  for (std::size_t i = 0; i < sp_corpus().size(); ++i) {
    const auto& inst = sp_corpus()[i];
    o.require(is_series_parallel(inst.network).series_parallel, "SP instance " + std::to_string(i));
    auto atlas = enumerate_supports(inst);
    o.require(atlas.is_concave(1e-9), "concavity, instance " + std::to_string(i));
    const double opt = optimal_two_states(inst, atlas).cost;
    const double fi = scheme_cost(inst, full_info_scheme(inst));
    worst = std::max(worst, std::abs(fi - opt));
    o.require(std::abs(fi - opt) <= 1e-9, "FI = OPT, instance " + std::to_string(i));
  }
  auto braess = braess_example<Rational>();
  o.require(optimal_two_states(braess).cost < scheme_cost(braess, full_info_scheme(braess)),
            "Braess OPT < FI");
  o.detail += (o.detail.empty() ? "" : "; ") + fmt("max |FI - OPT| %.2e", worst) + ", " +
              fmt("%.1f s", clock.seconds());
  return o;
}

Outcome monotonicity() {
  Outcome o;
  Clock clock;
  double worst = 0;
  for (std::size_t i = 0; i < corpus().size(); ++i) {
    double prev = -1e300;
    for (int k = 0; k <= 100; ++k) {
      const double c = equilibrium_cost(corpus()[i], Belief<double>::two_state(k / 100.0));
      worst = std::max(worst, prev - c);
      o.require(c >= prev - 1e-8, "instance " + std::to_string(i) + " at k=" + std::to_string(k));
      prev = c;
    }
  }
  o.detail += (o.detail.empty() ? "" : "; ") + fmt("largest decrease %.2e", std::max(worst, 0.0)) +
              ", " + fmt("%.1f s", clock.seconds());
  return o;
}

Outcome atlas_oracle() {
  Outcome o;
  Clock clock;
  std::vector<std::pair<std::string, Instance<double>>> cases{
      {"two-link", two_link_example<double>()}, {"Braess", braess_example<double>()}};
  for (std::size_t i = 0; i < corpus().size(); ++i) cases.emplace_back("corpus " + std::to_string(i), corpus()[i]);
  for (std::size_t i = 0; i < sp_corpus().size(); ++i) cases.emplace_back("SP " + std::to_string(i), sp_corpus()[i]);
  for (int n = 1; n <= 3; ++n) cases.emplace_back("nested " + std::to_string(n), nested_braess<double>(n));
  double worst = 0;
  for (const auto& [name, inst] : cases) {
    auto atlas = enumerate_supports(inst);
    double dev = 0;
    for (const auto& [mu, c] : grid_oracle(inst, 1000)) dev = std::max(dev, std::abs(atlas(mu) - c));
    worst = std::max(worst, dev);
    o.require(dev <= 1e-7, name);
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(cases.size()) + " instances, " +
              fmt("max deviation %.2e", worst) + ", " + fmt("%.1f s", clock.seconds());
  return o;
}

Outcome nested_growth() {
  Outcome o;
  std::vector<std::size_t> counts;
  for (int n = 1; n <= 3; ++n) counts.push_back(enumerate_supports(nested_braess<Rational>(n)).size());
  o.require(counts[0] < counts[1] && counts[1] < counts[2], "strict growth");
  o.require(counts[2] >= 2 * counts[1], "doubling at n=3");
  o.require(counts == std::vector<std::size_t>{3, 4, 8}, "frozen counts 3, 4, 8");
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("counts ") + std::to_string(counts[0]) +
              ", " + std::to_string(counts[1]) + ", " + std::to_string(counts[2]);
  return o;
}

Outcome tntp_pipeline() {
  Outcome o;
  Clock clock;
  auto tn = read_tntp_network(DEMANDSIG_DATA_DIR "/SiouxFalls_net.tntp");
  o.require(tn.num_nodes == 24 && tn.links.size() == 76, "24 nodes / 76 links");
  StudyConfig cfg;
  cfg.instances = 5;
  cfg.rho = 0.2;
  cfg.prior_high = 0.5;
  cfg.seed = 1;
  cfg.demand = 360600;
  auto result = run_study(bpr_to_affine(tn, 0.15), tn.num_zones, cfg);
  for (const auto& r : result.rows) {
    const std::string tag = std::to_string(r.s + 1) + "->" + std::to_string(r.t + 1);
    o.require(r.ok, tag + " failed: " + r.error);
    if (!r.ok) continue;
    o.require(r.c_opt <= std::min(r.c_fi, r.c_no) + 1e-9, tag + " OPT above min(FI, NO)");
    o.require(r.c_opt / r.c_pso >= 1, tag + " OPT/PSO below 1");
  }
  o.require(result.aggregates.supports_max <= 15, "MAX supports above 15");
  const double t = clock.seconds();
  o.require(t < 600, "runtime");
  std::ostringstream d;
  d << "AV " << fmt("%.2f", result.aggregates.supports_mean) << ", MAX "
    << result.aggregates.supports_max << ", " << fmt("%.1f s", t);
  o.detail += (o.detail.empty() ? "" : "; ") + d.str();
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"two-link golden values", two_link_goldens},
      {"Braess golden values", braess_goldens},
      {"FPTAS guarantee", fptas_guarantee},
      {"support LP equals envelope", support_lp_equivalence},
      {"series-parallel concavity and full information", series_parallel_full_info},
      {"monotone cost on a 101-point grid", monotonicity},
      {"atlas against the grid oracle", atlas_oracle},
      {"nested Braess segment growth", nested_growth},
      {"TNTP pipeline on Sioux Falls", tntp_pipeline},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
