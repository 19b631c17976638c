#include "demandsig/series_parallel.hpp"

#include <algorithm>
#include <map>

namespace demandsig {

namespace {

void flatten_into(const SpNode& node, SpNode::Kind kind, std::vector<std::string>& out) {
  if (node.kind == kind) {
    for (const auto& c : node.children) flatten_into(c, kind, out);
  } else {
    out.push_back(canonical_form(node));
  }
}

}  // namespace

std::string canonical_form(const SpNode& node) {
  if (node.kind == SpNode::Kind::Leaf) return "e" + std::to_string(node.edge);
  std::vector<std::string> parts;
  for (const auto& c : node.children) flatten_into(c, node.kind, parts);
  if (node.kind == SpNode::Kind::Parallel) std::sort(parts.begin(), parts.end());
  std::string out = node.kind == SpNode::Kind::Series ? "S(" : "P(";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out + ")";
}

std::vector<EdgeId> leaf_edges(const SpNode& node) {
  if (node.kind == SpNode::Kind::Leaf) return {node.edge};
  std::vector<EdgeId> out;
  for (const auto& c : node.children) {
    auto sub = leaf_edges(c);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

template <Scalar T>
SpVerdict is_series_parallel(const Network<T>& net) {
  struct Arc {
    VertexId u;
    VertexId v;
    SpNode node;
    bool alive;
  };
  auto dead = dead_edges(net);
  std::vector<Arc> arcs;
  for (EdgeId e = 0; e < net.num_edges(); ++e) {
    if (!std::binary_search(dead.begin(), dead.end(), e)) {
      arcs.push_back({net.edges[e].tail, net.edges[e].head, SpNode::leaf(e), true});
    }
  }
  SpVerdict verdict;
  if (arcs.empty()) {
    verdict.witness = "no s-t path";
    return verdict;
  }

  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::pair<VertexId, VertexId>, std::size_t> first;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (!arcs[i].alive) continue;
      auto [it, inserted] = first.emplace(std::make_pair(arcs[i].u, arcs[i].v), i);
      if (inserted) continue;
      auto& keep = arcs[it->second];
      keep.node = SpNode::parallel({std::move(keep.node), std::move(arcs[i].node)});
      arcs[i].alive = false;
      changed = true;
    }
    std::vector<std::vector<std::size_t>> in(net.num_vertices), out(net.num_vertices);
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (!arcs[i].alive) continue;
      out[arcs[i].u].push_back(i);
      in[arcs[i].v].push_back(i);
    }
    for (VertexId w = 0; w < net.num_vertices; ++w) {
      if (w == net.source || w == net.sink || in[w].size() != 1 || out[w].size() != 1) continue;
      auto& a = arcs[in[w][0]];
      auto& b = arcs[out[w][0]];
      if (!a.alive || !b.alive || a.u == b.v) continue;
      Arc merged{a.u, b.v, SpNode::series({std::move(a.node), std::move(b.node)}), true};
      a.alive = false;
      b.alive = false;
      arcs.push_back(std::move(merged));
      changed = true;
      break;
    }
  }

  std::vector<const Arc*> left;
  for (const auto& a : arcs) {
    if (a.alive) left.push_back(&a);
  }
  if (left.size() == 1 && left[0]->u == net.source && left[0]->v == net.sink) {
    verdict.series_parallel = true;
    verdict.decomposition = left[0]->node;
  } else {
    verdict.witness = "reduction stops with " + std::to_string(left.size()) + " arcs";
  }
  return verdict;
}

std::string_view to_string(FullInfoVerdict verdict) {
  return verdict == FullInfoVerdict::AlwaysOptimal ? "full-information-optimal"
                                                   : "full-information-may-be-suboptimal";
}

template <Scalar T>
FullInfoVerdict full_info_verdict(const Network<T>& net) {
  return is_series_parallel(net).series_parallel ? FullInfoVerdict::AlwaysOptimal
                                                 : FullInfoVerdict::MayBeSuboptimal;
}

template SpVerdict is_series_parallel(const Network<double>&);
template SpVerdict is_series_parallel(const Network<Rational>&);
template FullInfoVerdict full_info_verdict(const Network<double>&);
template FullInfoVerdict full_info_verdict(const Network<Rational>&);

}  // namespace demandsig
