#include "demandsig/atlas.hpp"
#include "demandsig/generators.hpp"
#include "demandsig/instance_io.hpp"
#include "demandsig/series_parallel.hpp"
#include "demandsig/signaling.hpp"
#include "demandsig/study.hpp"
#include "demandsig/tntp.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace {

using namespace demandsig;

constexpr int kValidationFailure = 2;
constexpr int kSolverFailure = 3;

struct Common {
  std::string instance;
  bool rational = false;
  std::string prior;
  bool prune = false;
};

struct SolveArgs {
  std::string belief;
  std::string method = "pivoting";
};

struct SignalArgs {
  std::string method = "exact";
  double eps = 0.1;
  std::string supports;
  std::size_t max_samples = 10000;
  bool prune_signals = false;
};

struct AtlasArgs {
  std::string format = "json";
};

struct StudyArgs {
  std::string net;
  std::string trips;
  double demand = 0;
  double eta = 0.15;
  double rho = 0.2;
  double prior = 0.5;
  int instances = 40;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  int zones = 0;
  std::string out;
  std::string summary;
};

struct GenArgs {
  int depth = 1;
  int edges = 6;
  std::uint64_t seed = 1;
  bool rational = false;
};

template <Scalar T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) out.push_back(parse_scalar<T>(item));
  return out;
}

template <Scalar T>
Belief<T> parse_belief(const std::string& text, std::size_t num_states) {
  auto values = parse_list<T>(text);
  if (values.size() == 1 && num_states == 2) return Belief<T>::two_state(values[0]);
  if (values.size() != num_states) throw ValidationError("belief has the wrong number of entries");
  return Belief<T>(std::move(values));
}

template <Scalar T>
Instance<T> load(const Common& c) {
  auto inst = read_instance<T>(c.instance);
  if (!c.prior.empty()) inst.prior = parse_belief<T>(c.prior, inst.states.size());
  auto report = validate(inst);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  if (!report.valid()) throw ValidationError(report.summary());
  if (c.prune && !report.dead_edges.empty()) inst = prune_dead_edges(inst);
  return inst;
}

template <Scalar T>
int run_solve(const Common& c, const SolveArgs& a) {
  auto inst = load<T>(c);
  Belief<T> mu = a.belief.empty() ? inst.prior : parse_belief<T>(a.belief, inst.states.size());
  WardropOptions opt;
  if (a.method == "frank-wolfe") opt.method = EquilibriumMethod::FrankWolfe;
  auto flow = solve_wardrop(inst, mu, opt);
  json out = {{"belief", scalars_to_json(mu.probabilities())},
              {"cost", scalar_to_json(flow.cost)},
              {"load", scalars_to_json(flow.load)},
              {"potential", scalars_to_json(flow.potential)},
              {"support", active_subnetwork(inst, flow, opt.tol).edges},
              {"virtual_demand", scalar_to_json(virtual_demand(mu, inst.states))}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

template <Scalar T>
int run_atlas(const Common& c, const AtlasArgs& a) {
  auto inst = load<T>(c);
  auto atlas = enumerate_supports(inst);
  if (a.format == "csv") {
    write_atlas_csv(std::cout, atlas);
  } else {
    std::cout << atlas_to_json(atlas).dump(2) << '\n';
  }
  return 0;
}

template <Scalar T>
std::vector<Support> read_supports(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json j;
  in >> j;
  std::vector<Support> out;
  for (const auto& s : j) {
    Support sup{s.get<std::vector<EdgeId>>()};
    std::sort(sup.edges.begin(), sup.edges.end());
    out.push_back(std::move(sup));
  }
  return out;
}

template <Scalar T>
int run_signal(const Common& c, const SignalArgs& a) {
  auto inst = load<T>(c);
  SignalingScheme<T> scheme;
  json extra = json::object();
  if (a.method == "fptas") {
    FptasOptions opt;
    opt.max_samples_per_side = a.max_samples;
    auto res = fptas_two_states(inst, a.eps, opt);
    scheme = res.scheme;
    extra = {{"eps", a.eps},
             {"samples_minus", res.samples_minus},
             {"samples_plus", res.samples_plus},
             {"required_samples", res.required_samples},
             {"truncated", res.truncated}};
    if (res.truncated) {
      std::cerr << "warning: sample grid truncated to " << a.max_samples
                << " per side; the accuracy bound asks for " << res.required_samples << '\n';
    }
  } else if (a.method == "exact") {
    scheme = optimal_two_states(inst).scheme;
  } else if (a.method == "lp-supports") {
    std::vector<Support> supports;
    if (a.supports.empty()) {
      const auto atlas = enumerate_supports(inst);
      std::set<Support> distinct;
      for (const auto& seg : atlas.segments()) distinct.insert(seg.support);
      supports.assign(distinct.begin(), distinct.end());
    } else {
      supports = read_supports<T>(a.supports);
    }
    auto res = optimal_scheme_for_supports(inst, std::span<const Support>(supports));
    scheme = res.scheme;
    extra["lp_cost"] = scalar_to_json(res.cost);
  } else if (a.method == "full-info") {
    scheme = full_info_scheme(inst);
  } else if (a.method == "no-signal") {
    scheme = no_signal_scheme(inst);
  } else {
    throw ValidationError("unknown method " + a.method);
  }
  if (a.prune_signals) scheme = prune_signals(scheme, inst);
  auto out = scheme_to_json(inst, scheme);
  out["method"] = a.method;
  for (auto& [k, v] : extra.items()) out[k] = v;
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_verdict(const Common& c) {
  auto inst = load<Rational>(c);
  auto v = is_series_parallel(inst.network);
  json out = {{"series_parallel", v.series_parallel},
              {"verdict", std::string(to_string(v.series_parallel ? FullInfoVerdict::AlwaysOptimal
                                                                  : FullInfoVerdict::MayBeSuboptimal))}};
  if (v.decomposition) out["decomposition"] = canonical_form(*v.decomposition);
  if (!v.witness.empty()) out["witness"] = v.witness;
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_study_cmd(const StudyArgs& a) {
  auto tn = read_tntp_network(a.net);
  StudyConfig cfg;
  cfg.instances = a.instances;
  cfg.rho = a.rho;
  cfg.prior_high = a.prior;
  cfg.seed = a.seed;
  cfg.workers = a.workers;
  if (a.demand > 0) {
    cfg.demand = a.demand;
  } else if (!a.trips.empty()) {
    cfg.demand = read_tntp_trips_total(a.trips);
  } else {
    throw ValidationError("study needs --trips or --demand");
  }
  const int zones = a.zones > 0 ? a.zones : tn.num_zones;
  auto result = run_study(bpr_to_affine(tn, a.eta), zones, cfg);
  auto emit = [](const std::string& path, auto writer) {
    if (path.empty() || path == "-") {
      writer(std::cout);
    } else {
      std::ofstream out(path);
      if (!out) throw ValidationError("cannot write " + path);
      writer(out);
    }
  };
  emit(a.out, [&](std::ostream& o) { write_study_rows_csv(o, result); });
  if (!a.summary.empty()) emit(a.summary, [&](std::ostream& o) { write_study_summary_csv(o, result); });
  for (const auto& r : result.rows) {
    if (!r.ok) std::cerr << "instance " << r.s + 1 << "->" << r.t + 1 << " failed: " << r.error << '\n';
  }
  return 0;
}

template <Scalar T>
json generate(const std::string& kind, const GenArgs& a) {
  if (kind == "nested-braess") return instance_to_json(nested_braess<T>(a.depth));
  return instance_to_json(random_series_parallel<T>(a.seed, a.edges).instance);
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const TntpError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverFailure;
  }
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-i,--instance", c.instance, "Instance JSON file")->required();
  cmd->add_flag("--rational", c.rational, "Exact rational arithmetic");
  cmd->add_option("--prior", c.prior, "Override the prior: high-state probability or a list");
  cmd->add_flag("--prune", c.prune, "Drop edges on no s-t walk before solving");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Public signaling of uncertain demand in affine congestion games"};
  app.require_subcommand(1);

  Common common;
  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Wardrop equilibrium for one belief");
  add_common(solve, common);
  solve->add_option("--belief", solve_args.belief, "Belief; defaults to the prior");
  solve->add_option("--method", solve_args.method, "pivoting | frank-wolfe")
      ->check(CLI::IsMember({"pivoting", "frank-wolfe"}));

  AtlasArgs atlas_args;
  auto* atlas = app.add_subcommand("atlas", "Enumerate equilibrium supports over [0,1]");
  add_common(atlas, common);
  atlas->add_option("--format", atlas_args.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  SignalArgs signal_args;
  auto* signal = app.add_subcommand("signal", "Compute a signaling scheme");
  add_common(signal, common);
  signal->add_option("--method", signal_args.method)
      ->check(CLI::IsMember({"fptas", "exact", "lp-supports", "full-info", "no-signal"}));
  signal->add_option("--eps", signal_args.eps, "FPTAS accuracy")->check(CLI::PositiveNumber);
  signal->add_option("--supports", signal_args.supports, "JSON list of edge-id lists");
  signal->add_option("--max-samples", signal_args.max_samples, "FPTAS samples per side");
  signal->add_flag("--prune-signals", signal_args.prune_signals, "Merge redundant signals");

  auto* verdict = app.add_subcommand("verdict", "Series-parallel check and full-information verdict");
  add_common(verdict, common);

  StudyArgs study_args;
  auto* study = app.add_subcommand("study", "Random (s,t) study on a TNTP network");
  study->add_option("--net", study_args.net, "TNTP _net file")->required();
  study->add_option("--trips", study_args.trips, "TNTP _trips file; its total sets the demand");
  study->add_option("--demand", study_args.demand, "High-state demand (overrides --trips)");
  study->add_option("--eta", study_args.eta, "BPR eta");
  study->add_option("--rho", study_args.rho, "Low-state demand ratio");
  study->add_option("--prior", study_args.prior, "Prior probability of the high state");
  study->add_option("--instances", study_args.instances);
  study->add_option("--seed", study_args.seed);
  study->add_option("--workers", study_args.workers);
  study->add_option("--zones", study_args.zones, "Override the zone count");
  study->add_option("--out", study_args.out, "Row CSV (default stdout)");
  study->add_option("--summary", study_args.summary, "Aggregate CSV");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate instances");
  gen->require_subcommand(1);
  auto* gen_nested = gen->add_subcommand("nested-braess", "Nested Braess family");
  gen_nested->add_option("--depth", gen_args.depth)->check(CLI::PositiveNumber);
  gen_nested->add_flag("--rational", gen_args.rational);
  auto* gen_sp = gen->add_subcommand("random-sp", "Random series-parallel instance");
  gen_sp->add_option("--edges", gen_args.edges)->check(CLI::PositiveNumber);
  gen_sp->add_option("--seed", gen_args.seed);
  gen_sp->add_flag("--rational", gen_args.rational);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationFailure;
  }

  return guarded([&]() -> int {
    if (*solve) return common.rational ? run_solve<Rational>(common, solve_args)
                                       : run_solve<double>(common, solve_args);
    if (*atlas) return common.rational ? run_atlas<Rational>(common, atlas_args)
                                       : run_atlas<double>(common, atlas_args);
    if (*signal) return common.rational ? run_signal<Rational>(common, signal_args)
                                        : run_signal<double>(common, signal_args);
    if (*verdict) return run_verdict(common);
    if (*study) return run_study_cmd(study_args);
    const std::string kind = *gen_nested ? "nested-braess" : "random-sp";
    json out = gen_args.rational ? generate<Rational>(kind, gen_args) : generate<double>(kind, gen_args);
    std::cout << out.dump(2) << '\n';
    return 0;
  });
}
