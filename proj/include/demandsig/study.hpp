#pragma once

#include "demandsig/atlas.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace demandsig {

struct StudyConfig {
  int instances = 40;
  double rho = 0.2;
  double prior_high = 0.5;
  std::uint64_t seed = 1;
  /// Demand of the high state before normalization.
  double demand = 1.0;
  /// 0 picks the hardware concurrency.
  unsigned workers = 0;
  double classify_tol = 1e-9;
  AtlasOptions atlas;
};

/// Costs are in the original (unnormalized) units.
struct StudyRow {
  int s = 0;
  int t = 0;
  bool ok = false;
  std::string error;
  std::size_t num_supports = 0;
  std::vector<double> breakpoints;
  double c_fi = 0;
  double c_no = 0;
  double c_opt = 0;
  double c_pso = 0;
  bool concave = false;
  bool linear = false;
};

struct StudyAggregates {
  std::size_t completed = 0;
  double supports_mean = 0;
  double supports_sd = 0;
  std::size_t supports_max = 0;
  /// Concave share excludes linear curves.
  double concave_pct = 0;
  double linear_pct = 0;
  double fi_optimal_pct = 0;
  double fi_over_opt = 0;
  double no_over_opt = 0;
  double opt_over_pso = 0;
  double we_over_pso = 0;
};

struct ExperimentResult {
  std::vector<StudyRow> rows;
  StudyAggregates aggregates;
};

/// Zones are vertices 0 .. num_zones-1; (s, t) pairs are drawn without repetition.
ExperimentResult run_study(const Network<double>& network, int num_zones, const StudyConfig& config);

/// s,t are written 1-based to match TNTP node ids.
void write_study_rows_csv(std::ostream& out, const ExperimentResult& result);
void write_study_summary_csv(std::ostream& out, const ExperimentResult& result);

}  // namespace demandsig
