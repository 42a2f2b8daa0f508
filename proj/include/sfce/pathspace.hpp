#pragma once

// Per-commodity augmented-graph construction, augmented-path enumeration
// via Yen's k-shortest loopless paths, and path trust evaluation.

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "sfce/net_model.hpp"

namespace sfce {

inline constexpr int kUnlimitedPaths = std::numeric_limits<int>::max();

enum class EligibilityMode { TrustOn, TrustOff };

inline bool eligible_host(const SubstrateNetwork& net, const SubstrateNode& n, double cpu_demand,
                          TrustValue trust_req, EligibilityMode mode) {
  if (n.kind != NodeKind::Server) return false;
  if (net.residual_cpu(n.id) < cpu_demand) return false;
  if (mode == EligibilityMode::TrustOn && n.trust.value() < trust_req.value()) return false;
  return true;
}

/// Substrate graph extended, for one commodity, with directed edges from the
/// virtual source to its eligible hosts and from eligible hosts to the
/// virtual sink. Substrate links act as bidirectional arcs.
struct AugmentedGraph {
  const SubstrateNetwork* net{nullptr};
  int vsrc{};
  int vdst{};
  std::vector<int> source_hosts;  // u with an (vsrc,u) augmented edge
  std::vector<int> sink_hosts;    // u with a (u,vdst) augmented edge
};

inline AugmentedGraph build_augmented_graph(const SubstrateNetwork& net, const ServiceRequest& req,
                                            const VirtualLink& commodity, EligibilityMode mode) {
  if (!req.find_vlink(commodity.src, commodity.dst)) {
    throw std::invalid_argument("commodity is not a virtual link of the request");
  }
  AugmentedGraph g;
  g.net = &net;
  g.vsrc = commodity.src;
  g.vdst = commodity.dst;
  const Vnf& s = req.vnf(commodity.src);
  const Vnf& t = req.vnf(commodity.dst);
  for (const auto& n : net.nodes()) {
    if (eligible_host(net, n, s.cpu_demand, s.trust_req, mode)) g.source_hosts.push_back(n.id);
    if (eligible_host(net, n, t.cpu_demand, t.trust_req, mode)) g.sink_hosts.push_back(n.id);
  }
  std::sort(g.source_hosts.begin(), g.source_hosts.end());
  std::sort(g.sink_hosts.begin(), g.sink_hosts.end());
  return g;
}

enum class PathTrustPolicy { MinLink, ProductLink, Assigned };

/// Canonical key of the undirected substrate edge sequence, shared by a path
/// and its reverse. Colocation paths have no key (trust fixed at 1).
inline std::string path_trust_key(const AugmentedPath& p) {
  std::vector<int> seq = p.node_seq;
  std::vector<int> rev(seq.rbegin(), seq.rend());
  if (rev < seq) seq = rev;
  std::string key;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) key += '-';
    key += std::to_string(seq[i]);
  }
  return key;
}

using PathTrustTable = std::map<std::string, TrustValue>;

inline TrustValue path_trust(const SubstrateNetwork& net, const AugmentedPath& p, PathTrustPolicy policy,
                             const PathTrustTable* table = nullptr) {
  if (p.is_colocation()) return TrustValue(1.0);
  switch (policy) {
    case PathTrustPolicy::MinLink: {
      double t = 1.0;
      for (std::size_t i = 1; i < p.node_seq.size(); ++i) {
        t = std::min(t, net.links()[*net.link_between(p.node_seq[i - 1], p.node_seq[i])].trust.value());
      }
      return TrustValue(t);
    }
    case PathTrustPolicy::ProductLink: {
      double t = 1.0;
      for (std::size_t i = 1; i < p.node_seq.size(); ++i) {
        t *= net.links()[*net.link_between(p.node_seq[i - 1], p.node_seq[i])].trust.value();
      }
      return TrustValue(t);
    }
    case PathTrustPolicy::Assigned: {
      if (table == nullptr) throw std::invalid_argument("assigned trust policy requires a table");
      auto it = table->find(path_trust_key(p));
      if (it == table->end()) {
        throw std::invalid_argument("no assigned trust for path " + path_trust_key(p));
      }
      return it->second;
    }
  }
  throw std::logic_error("unreachable");
}

namespace detail {

// Virtual endpoints in the augmented digraph. Substrate node ids are
// required to be distinct from these sentinels (the generators and schemas
// use nonnegative ids).
inline constexpr int kVirtualSrc = -1;
inline constexpr int kVirtualDst = -2;

struct YenGraph {
  const AugmentedGraph* g;
  const std::map<std::size_t, double>* weights;  // link index -> cost, null = unit hop

  double link_cost(std::size_t li) const {
    if (weights == nullptr) return 1.0;
    auto it = weights->find(li);
    if (it == weights->end()) throw std::invalid_argument("missing custom weight for a substrate link");
    if (!(it->second > 0)) throw std::invalid_argument("custom link weights must be positive");
    return it->second;
  }
};

// A full augmented node sequence: kVirtualSrc, hosts..., kVirtualDst.
using NodeSeq = std::vector<int>;
using Arc = std::pair<int, int>;

struct Label {
  double cost;
  NodeSeq seq;
  bool operator<(const Label& o) const {
    if (cost != o.cost) return cost < o.cost;
    return seq < o.seq;
  }
};

// Dijkstra from `start` (a sequence prefix position) to the virtual sink,
// minimizing (cost, node sequence). Positive substrate weights keep every
// optimum loopless; the sequence tie-break makes the result unique and
// deterministic. Banned arcs only ever refer to arcs leaving the start node.
inline std::optional<Label> lexmin_path(const YenGraph& yg, int start, double start_cost,
                                        const NodeSeq& prefix, const std::set<int>& banned_nodes,
                                        const std::set<Arc>& banned_arcs) {
  const auto& g = *yg.g;
  const auto& net = *g.net;
  std::set<int> sinks(g.sink_hosts.begin(), g.sink_hosts.end());

  std::map<int, Label> best;
  struct Cmp {
    bool operator()(const std::pair<Label, int>& a, const std::pair<Label, int>& b) const {
      return b.first < a.first;  // min-heap on Label
    }
  };
  std::priority_queue<std::pair<Label, int>, std::vector<std::pair<Label, int>>, Cmp> heap;

  auto push = [&](int node, Label l) {
    auto it = best.find(node);
    if (it == best.end() || l < it->second) {
      best[node] = l;
      heap.push({std::move(l), node});
    }
  };

  push(start, Label{start_cost, prefix});

  while (!heap.empty()) {
    auto [label, u] = heap.top();
    heap.pop();
    if (best.at(u) < label) continue;
    if (u == kVirtualDst) return label;

    auto arc_ok = [&](int v) { return u != start || !banned_arcs.count({u, v}); };

    if (u == kVirtualSrc) {
      for (int h : g.source_hosts) {
        if (banned_nodes.count(h) || !arc_ok(h)) continue;
        Label nl{label.cost, label.seq};
        nl.seq.push_back(h);
        push(h, std::move(nl));
      }
      continue;
    }
    // Substrate node: sink arc plus substrate arcs.
    if (sinks.count(u) && arc_ok(kVirtualDst)) {
      Label nl{label.cost, label.seq};
      nl.seq.push_back(kVirtualDst);
      push(kVirtualDst, std::move(nl));
    }
    for (std::size_t li : net.links_at(u)) {
      const auto& l = net.links()[li];
      int v = l.a == u ? l.b : l.a;
      if (banned_nodes.count(v) || !arc_ok(v)) continue;
      // Loops are suboptimal (positive weight) except revisits of the
      // prefix, which the caller bans; still skip nodes already in seq.
      if (std::find(label.seq.begin(), label.seq.end(), v) != label.seq.end()) continue;
      Label nl{label.cost + yg.link_cost(li), label.seq};
      nl.seq.push_back(v);
      push(v, std::move(nl));
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Yen's algorithm over the augmented graph. Augmented edges cost 0, so the
/// path cost equals the substrate transport cost and colocation paths sort
/// first. Equal-cost paths are ordered by their node-id sequence, which makes
/// the output the exact prefix of the full (cost, sequence)-sorted
/// enumeration.
inline std::vector<AugmentedPath> k_shortest_augmented_paths(
    const AugmentedGraph& g, int k, const std::map<std::size_t, double>* link_weights = nullptr) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<AugmentedPath> result;
  if (g.source_hosts.empty() || g.sink_hosts.empty()) return result;

  detail::YenGraph yg{&g, link_weights};

  using detail::Label;
  using detail::NodeSeq;

  std::set<Label> candidates;  // ordered by (cost, sequence)
  std::vector<NodeSeq> accepted;
  std::set<NodeSeq> known;

  auto seed = detail::lexmin_path(yg, detail::kVirtualSrc, 0.0, {detail::kVirtualSrc}, {}, {});
  if (!seed) return result;
  candidates.insert(*seed);
  known.insert(seed->seq);

  while (!candidates.empty() && static_cast<int>(accepted.size()) < k) {
    Label cur = *candidates.begin();
    candidates.erase(candidates.begin());
    accepted.push_back(cur.seq);

    AugmentedPath p;
    p.vsrc = g.vsrc;
    p.vdst = g.vdst;
    p.node_seq = NodeSeq(cur.seq.begin() + 1, cur.seq.end() - 1);
    p.host_src = p.node_seq.front();
    p.host_dst = p.node_seq.back();
    p.cost = cur.cost;
    result.push_back(std::move(p));

    // Spur from every position except the sink.
    for (std::size_t spur = 0; spur + 1 < cur.seq.size(); ++spur) {
      NodeSeq root(cur.seq.begin(), cur.seq.begin() + spur + 1);
      std::set<int> banned_nodes(root.begin(), root.end() - 1);
      std::set<detail::Arc> banned_arcs;
      for (const auto& prev : accepted) {
        if (prev.size() > spur + 1 && std::equal(root.begin(), root.end(), prev.begin())) {
          banned_arcs.insert({prev[spur], prev[spur + 1]});
        }
      }
      double root_cost = 0;
      for (std::size_t i = 2; i <= spur; ++i) {
        root_cost += yg.link_cost(*g.net->link_between(root[i - 1], root[i]));
      }
      auto spur_path = detail::lexmin_path(yg, root.back(), root_cost, root, banned_nodes, banned_arcs);
      if (spur_path && known.insert(spur_path->seq).second) candidates.insert(*spur_path);
    }
  }
  return result;
}

/// Map commodity -> candidate path list, with globally unique path ids.
class PathUniverse {
 public:
  using Key = std::pair<int, int>;

  const std::vector<AugmentedPath>& paths_for(int vsrc, int vdst) const {
    static const std::vector<AugmentedPath> empty;
    auto it = by_commodity_.find({vsrc, vdst});
    return it == by_commodity_.end() ? empty : it->second;
  }

  const std::map<Key, std::vector<AugmentedPath>>& by_commodity() const { return by_commodity_; }
  std::map<Key, std::vector<AugmentedPath>>& mutable_by_commodity() { return by_commodity_; }

  std::size_t total_paths() const {
    std::size_t n = 0;
    for (const auto& [k, v] : by_commodity_) n += v.size();
    return n;
  }

  void add(Key key, std::vector<AugmentedPath> paths) {
    for (auto& p : paths) p.id = next_id_++;
    by_commodity_[key] = std::move(paths);
  }

 private:
  std::map<Key, std::vector<AugmentedPath>> by_commodity_;
  long next_id_{0};
};

/// Builds the per-commodity path sets and evaluates trust under the active
/// policy. Universes are nested in k: the list for k is a prefix of the one
/// for any larger k on identical inputs.
inline PathUniverse build_path_universe(const SubstrateNetwork& net, const ServiceRequest& req, int k,
                                        EligibilityMode mode, PathTrustPolicy policy,
                                        const PathTrustTable* table = nullptr,
                                        const std::map<std::size_t, double>* link_weights = nullptr) {
  PathUniverse universe;
  for (const auto& e : req.vlinks()) {
    auto g = build_augmented_graph(net, req, e, mode);
    auto paths = k_shortest_augmented_paths(g, k, link_weights);
    for (auto& p : paths) p.trust = path_trust(net, p, policy, table);
    universe.add({e.src, e.dst}, std::move(paths));
  }
  return universe;
}

}  // namespace sfce
