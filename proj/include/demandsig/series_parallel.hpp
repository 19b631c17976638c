#pragma once

#include "demandsig/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace demandsig {

/// Decomposition tree of a two-terminal series-parallel network.
struct SpNode {
  enum class Kind { Leaf, Series, Parallel };

  Kind kind = Kind::Leaf;
  EdgeId edge = -1;
  std::vector<SpNode> children;

  static SpNode leaf(EdgeId e) { return {Kind::Leaf, e, {}}; }
  static SpNode series(std::vector<SpNode> c) { return {Kind::Series, -1, std::move(c)}; }
  static SpNode parallel(std::vector<SpNode> c) { return {Kind::Parallel, -1, std::move(c)}; }
};

/// Flattens nested nodes of equal kind and orders parallel children, so two
/// trees describing the same composition print identically.
std::string canonical_form(const SpNode& node);

std::vector<EdgeId> leaf_edges(const SpNode& node);

struct SpVerdict {
  bool series_parallel = false;
  std::optional<SpNode> decomposition;
  /// Why the reduction got stuck, when it did.
  std::string witness;
};

/// Series and parallel reductions on the live part of the network (edges on
/// some s-t walk); the network is series-parallel iff one s-t edge remains.
template <Scalar T>
SpVerdict is_series_parallel(const Network<T>& network);

enum class FullInfoVerdict { AlwaysOptimal, MayBeSuboptimal };

std::string_view to_string(FullInfoVerdict verdict);

template <Scalar T>
FullInfoVerdict full_info_verdict(const Network<T>& network);

}  // namespace demandsig
