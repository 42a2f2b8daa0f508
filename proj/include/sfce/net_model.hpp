#pragma once

// Domain types for the substrate network, service requests, embedding
// solutions, and the independent solution validator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sfce {

inline constexpr double kFeasTol = 1e-6;

/// Scalar trustworthiness in [0,1].
class TrustValue {
 public:
  TrustValue() = default;
  explicit TrustValue(double v) : v_(v) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("trust value outside [0,1]: " + std::to_string(v));
    }
  }
  double value() const { return v_; }
  friend bool operator==(TrustValue a, TrustValue b) { return a.v_ == b.v_; }
  friend bool operator<(TrustValue a, TrustValue b) { return a.v_ < b.v_; }

 private:
  double v_{0.0};
};

enum class NodeKind { Server, Switch };

struct SubstrateNode {
  int id{};
  std::string name;
  NodeKind kind{NodeKind::Server};
  double total_cpu{0.0};     // GHz*cores
  double residual_cpu{0.0};  // residual before any tracked embedding
  TrustValue trust;
};

struct SubstrateLink {
  int a{};
  int b{};
  double capacity{0.0};     // Mbps
  double residual_bw{0.0};  // residual before any tracked embedding
  TrustValue trust;
};

namespace detail {
inline std::pair<int, int> norm_edge(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}
}  // namespace detail

/// Resources consumed by one embedded request, kept so that release can
/// restore residuals exactly (in-use totals are recomputed from the ledger
/// in request-id order, never decremented in place).
struct ResourceAllocation {
  std::map<std::size_t, double> cpu_by_node;  // node index -> GHz*cores
  std::map<std::size_t, double> bw_by_link;   // link index -> Mbps
};

/// Undirected capacitated substrate graph. Immutable apart from the
/// embedding ledger; apply/release return modified copies.
class SubstrateNetwork {
 public:
  SubstrateNetwork() = default;

  SubstrateNetwork(std::vector<SubstrateNode> nodes, std::vector<SubstrateLink> links)
      : nodes_(std::move(nodes)), links_(std::move(links)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      if (!index_of_.emplace(n.id, i).second) {
        throw std::invalid_argument("duplicate substrate node id " + std::to_string(n.id));
      }
      if (n.residual_cpu < 0 || n.residual_cpu > n.total_cpu + kFeasTol) {
        throw std::invalid_argument("node " + std::to_string(n.id) + ": residual_cpu outside [0, total_cpu]");
      }
      if (n.kind == NodeKind::Switch && n.total_cpu > 0) {
        throw std::invalid_argument("switch " + std::to_string(n.id) + " must carry no compute");
      }
    }
    for (std::size_t i = 0; i < links_.size(); ++i) {
      const auto& l = links_[i];
      if (l.a == l.b) throw std::invalid_argument("self-loop substrate link");
      if (!index_of_.count(l.a) || !index_of_.count(l.b)) {
        throw std::invalid_argument("link endpoint does not exist");
      }
      if (!link_index_.emplace(detail::norm_edge(l.a, l.b), i).second) {
        throw std::invalid_argument("parallel substrate link");
      }
      if (l.residual_bw < 0 || l.residual_bw > l.capacity + kFeasTol) {
        throw std::invalid_argument("link residual_bw outside [0, capacity]");
      }
    }
    cpu_in_use_.assign(nodes_.size(), 0.0);
    bw_in_use_.assign(links_.size(), 0.0);
    for (std::size_t i = 0; i < links_.size(); ++i) {
      adjacency_[links_[i].a].push_back(i);
      adjacency_[links_[i].b].push_back(i);
    }
  }

  const std::vector<SubstrateNode>& nodes() const { return nodes_; }
  const std::vector<SubstrateLink>& links() const { return links_; }

  bool has_node(int id) const { return index_of_.count(id) != 0; }

  std::size_t node_index(int id) const {
    auto it = index_of_.find(id);
    if (it == index_of_.end()) throw std::invalid_argument("unknown substrate node " + std::to_string(id));
    return it->second;
  }

  const SubstrateNode& node(int id) const { return nodes_[node_index(id)]; }

  std::optional<std::size_t> link_between(int a, int b) const {
    auto it = link_index_.find(detail::norm_edge(a, b));
    if (it == link_index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<std::size_t>& links_at(int node_id) const {
    static const std::vector<std::size_t> empty;
    auto it = adjacency_.find(node_id);
    return it == adjacency_.end() ? empty : it->second;
  }

  double residual_cpu(int node_id) const {
    auto i = node_index(node_id);
    return nodes_[i].residual_cpu - cpu_in_use_[i];
  }

  double residual_bw(std::size_t link_index) const {
    return links_[link_index].residual_bw - bw_in_use_[link_index];
  }

  double total_server_cpu() const {
    double s = 0;
    for (const auto& n : nodes_) s += n.total_cpu;
    return s;
  }

  double cpu_in_use_total() const {
    double s = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      s += (nodes_[i].total_cpu - nodes_[i].residual_cpu) + cpu_in_use_[i];
    }
    return s;
  }

  bool has_allocation(int request_id) const { return allocations_.count(request_id) != 0; }
  std::size_t allocation_count() const { return allocations_.size(); }

  void add_allocation(int request_id, ResourceAllocation alloc) {
    if (!allocations_.emplace(request_id, std::move(alloc)).second) {
      throw std::invalid_argument("request " + std::to_string(request_id) + " already embedded");
    }
    recompute_in_use();
  }

  void remove_allocation(int request_id) {
    if (allocations_.erase(request_id) == 0) {
      throw std::invalid_argument("request " + std::to_string(request_id) + " is not embedded");
    }
    recompute_in_use();
  }

 private:
  void recompute_in_use() {
    cpu_in_use_.assign(nodes_.size(), 0.0);
    bw_in_use_.assign(links_.size(), 0.0);
    for (const auto& [rid, alloc] : allocations_) {
      (void)rid;
      for (const auto& [ni, g] : alloc.cpu_by_node) cpu_in_use_[ni] += g;
      for (const auto& [li, f] : alloc.bw_by_link) bw_in_use_[li] += f;
    }
  }

  std::vector<SubstrateNode> nodes_;
  std::vector<SubstrateLink> links_;
  std::map<int, std::size_t> index_of_;
  std::map<std::pair<int, int>, std::size_t> link_index_;
  std::map<int, std::vector<std::size_t>> adjacency_;
  std::map<int, ResourceAllocation> allocations_;
  std::vector<double> cpu_in_use_;
  std::vector<double> bw_in_use_;
};

struct Vnf {
  int id{};
  std::string function_type;
  double cpu_demand{0.0};  // g^i, GHz*cores
  TrustValue trust_req;
};

struct VirtualLink {
  int src{};
  int dst{};
  double bw_demand{0.0};  // d^{ij}, Mbps
  TrustValue trust_req;
};

/// Directed VNF chain graph with demands and trust requirements.
class ServiceRequest {
 public:
  ServiceRequest() = default;

  ServiceRequest(int id, std::vector<Vnf> vnfs, std::vector<VirtualLink> vlinks,
                 double arrival_time = 0.0, double holding_time = 1.0)
      : id_(id),
        vnfs_(std::move(vnfs)),
        vlinks_(std::move(vlinks)),
        arrival_time_(arrival_time),
        holding_time_(holding_time) {
    if (holding_time_ <= 0) throw std::invalid_argument("holding_time must be positive");
    std::set<int> ids;
    for (const auto& v : vnfs_) {
      if (v.cpu_demand < 0) throw std::invalid_argument("negative cpu_demand");
      if (!ids.insert(v.id).second) throw std::invalid_argument("duplicate vnf id");
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& e : vlinks_) {
      if (e.src == e.dst) throw std::invalid_argument("virtual link with identical endpoints");
      if (!ids.count(e.src) || !ids.count(e.dst)) throw std::invalid_argument("virtual link endpoint not in vnfs");
      if (e.bw_demand < 0) throw std::invalid_argument("negative bw_demand");
      if (!seen.insert({e.src, e.dst}).second) throw std::invalid_argument("duplicate virtual link");
    }
  }

  int id() const { return id_; }
  const std::vector<Vnf>& vnfs() const { return vnfs_; }
  const std::vector<VirtualLink>& vlinks() const { return vlinks_; }
  double arrival_time() const { return arrival_time_; }
  double holding_time() const { return holding_time_; }

  const Vnf& vnf(int vnf_id) const {
    for (const auto& v : vnfs_) {
      if (v.id == vnf_id) return v;
    }
    throw std::invalid_argument("unknown vnf " + std::to_string(vnf_id));
  }

  const VirtualLink* find_vlink(int src, int dst) const {
    for (const auto& e : vlinks_) {
      if (e.src == src && e.dst == dst) return &e;
    }
    return nullptr;
  }

 private:
  int id_{0};
  std::vector<Vnf> vnfs_;
  std::vector<VirtualLink> vlinks_;
  double arrival_time_{0.0};
  double holding_time_{1.0};
};

/// Candidate substrate routing for one commodity. The interior node
/// sequence runs host_src..host_dst and is a simple path of the substrate
/// graph; a single-node sequence encodes colocation.
struct AugmentedPath {
  long id{-1};
  int vsrc{};
  int vdst{};
  int host_src{};
  int host_dst{};
  std::vector<int> node_seq;  // size >= 1
  double cost{0.0};
  TrustValue trust{1.0};

  int hop_count() const { return static_cast<int>(node_seq.size()) - 1; }
  bool is_colocation() const { return node_seq.size() == 1; }
};

struct FlowAllocation {
  AugmentedPath path;
  double amount{0.0};  // f_p, Mbps
};

struct EmbeddingSolution {
  std::map<int, int> assignment;  // vnf id -> substrate node id
  std::vector<FlowAllocation> flows;
  double objective_value{0.0};
  double bw_cost{0.0};
  double bw_revenue{0.0};
  double cpu_cost{0.0};
  double cpu_revenue{0.0};
};

enum class TrustMode { None, NodeTrust, NodeAndLinkTrust };

struct Violation {
  std::string family;
  std::string what;
  double slack{0.0};  // negative = amount of infeasibility
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
};

namespace detail {

inline void check_path_structure(const SubstrateNetwork& net, const ServiceRequest& req,
                                 const AugmentedPath& p) {
  if (p.node_seq.empty()) throw std::invalid_argument("augmented path with empty node sequence");
  if (!req.find_vlink(p.vsrc, p.vdst)) {
    throw std::invalid_argument("flow on unknown commodity (" + std::to_string(p.vsrc) + "," +
                                std::to_string(p.vdst) + ")");
  }
  if (p.node_seq.front() != p.host_src || p.node_seq.back() != p.host_dst) {
    throw std::invalid_argument("augmented path hosts disagree with node sequence");
  }
  std::set<int> seen;
  for (std::size_t i = 0; i < p.node_seq.size(); ++i) {
    if (!net.has_node(p.node_seq[i])) {
      throw std::invalid_argument("augmented path references unknown node " + std::to_string(p.node_seq[i]));
    }
    if (!seen.insert(p.node_seq[i]).second) throw std::invalid_argument("augmented path is not loopless");
    if (i > 0 && !net.link_between(p.node_seq[i - 1], p.node_seq[i])) {
      throw std::invalid_argument("augmented path uses non-existent substrate link");
    }
  }
}

}  // namespace detail

/// Independent constraint re-check of a candidate solution against the raw
/// networks. Structural defects (unknown ids, malformed paths) throw; rule
/// violations are reported with their family and slack.
inline ValidationReport validate_solution(const SubstrateNetwork& net, const ServiceRequest& req,
                                          const EmbeddingSolution& sol, TrustMode mode,
                                          double eps = kFeasTol) {
  ValidationReport report;
  auto violate = [&](std::string family, std::string what, double slack) {
    report.violations.push_back({std::move(family), std::move(what), slack});
  };

  // Structural preconditions.
  std::set<int> vnf_ids;
  for (const auto& v : req.vnfs()) vnf_ids.insert(v.id);
  std::set<int> assigned;
  for (const auto& [i, u] : sol.assignment) {
    if (!vnf_ids.count(i)) throw std::invalid_argument("assignment of unknown vnf " + std::to_string(i));
    if (!net.has_node(u)) throw std::invalid_argument("assignment to unknown node " + std::to_string(u));
    assigned.insert(i);
  }
  if (assigned != vnf_ids) throw std::invalid_argument("assignment keys do not match the request VNF set");
  for (const auto& fa : sol.flows) detail::check_path_structure(net, req, fa.path);

  // placement: one host per VNF (held by map structure; hosts must be servers).
  for (const auto& [i, u] : sol.assignment) {
    if (net.node(u).kind != NodeKind::Server) {
      violate("placement", "vnf " + std::to_string(i) + " placed on switch " + std::to_string(u), -1.0);
    }
  }

  // demand: flows of each commodity sum to d^{ij}.
  std::map<std::pair<int, int>, double> flow_sum;
  for (const auto& fa : sol.flows) {
    if (fa.amount < -eps) violate("demand", "negative flow on path " + std::to_string(fa.path.id), fa.amount);
    flow_sum[{fa.path.vsrc, fa.path.vdst}] += fa.amount;
  }
  for (const auto& e : req.vlinks()) {
    double got = 0;
    if (auto it = flow_sum.find({e.src, e.dst}); it != flow_sum.end()) got = it->second;
    if (std::abs(got - e.bw_demand) > eps) {
      violate("demand",
              "commodity (" + std::to_string(e.src) + "," + std::to_string(e.dst) + ") carries " +
                  std::to_string(got) + " of " + std::to_string(e.bw_demand),
              -std::abs(got - e.bw_demand));
    }
  }

  // coupling: positive flow only through paths anchored at the assigned hosts.
  for (const auto& fa : sol.flows) {
    if (fa.amount <= eps) continue;
    if (sol.assignment.at(fa.path.vsrc) != fa.path.host_src) {
      violate("coupling_src",
              "path " + std::to_string(fa.path.id) + " leaves from non-assigned host " +
                  std::to_string(fa.path.host_src),
              -fa.amount);
    }
    if (sol.assignment.at(fa.path.vdst) != fa.path.host_dst) {
      violate("coupling_dst",
              "path " + std::to_string(fa.path.id) + " arrives at non-assigned host " +
                  std::to_string(fa.path.host_dst),
              -fa.amount);
    }
  }

  // node trust.
  if (mode == TrustMode::NodeTrust || mode == TrustMode::NodeAndLinkTrust) {
    for (const auto& [i, u] : sol.assignment) {
      double margin = net.node(u).trust.value() - req.vnf(i).trust_req.value();
      if (margin < -eps) {
        violate("node_trust",
                "vnf " + std::to_string(i) + " on node " + std::to_string(u) + " below trust requirement",
                margin);
      }
    }
  }

  // path trust.
  if (mode == TrustMode::NodeAndLinkTrust) {
    for (const auto& fa : sol.flows) {
      if (fa.amount <= eps) continue;
      const VirtualLink* e = req.find_vlink(fa.path.vsrc, fa.path.vdst);
      double margin = fa.path.trust.value() - e->trust_req.value();
      if (margin < -eps) {
        violate("path_trust", "path " + std::to_string(fa.path.id) + " below link trust requirement", margin);
      }
    }
  }

  // cpu capacity.
  std::map<int, double> cpu_load;
  for (const auto& [i, u] : sol.assignment) cpu_load[u] += req.vnf(i).cpu_demand;
  for (const auto& [u, g] : cpu_load) {
    double slack = net.residual_cpu(u) - g;
    if (slack < -eps) {
      violate("cpu_cap", "node " + std::to_string(u) + " over residual cpu", slack);
    }
  }

  // bandwidth capacity per undirected link, both traversal directions summed.
  std::map<std::size_t, double> bw_load;
  for (const auto& fa : sol.flows) {
    for (std::size_t i = 1; i < fa.path.node_seq.size(); ++i) {
      bw_load[*net.link_between(fa.path.node_seq[i - 1], fa.path.node_seq[i])] += fa.amount;
    }
  }
  for (const auto& [li, f] : bw_load) {
    double slack = net.residual_bw(li) - f;
    if (slack < -eps) {
      const auto& l = net.links()[li];
      violate("bw_cap",
              "link (" + std::to_string(l.a) + "," + std::to_string(l.b) + ") over residual bandwidth", slack);
    }
  }

  return report;
}

/// Revenue/cost accounting: bandwidth revenue is the total demand, bandwidth
/// cost weighs flow by substrate hop count, processing cost weighs demand by
/// host trust.
inline void fill_accounting(const SubstrateNetwork& net, const ServiceRequest& req, EmbeddingSolution& sol) {
  sol.bw_revenue = 0;
  for (const auto& e : req.vlinks()) sol.bw_revenue += e.bw_demand;
  sol.bw_cost = 0;
  for (const auto& fa : sol.flows) sol.bw_cost += fa.amount * fa.path.hop_count();
  sol.cpu_revenue = 0;
  sol.cpu_cost = 0;
  for (const auto& v : req.vnfs()) {
    sol.cpu_revenue += v.cpu_demand;
    sol.cpu_cost += v.cpu_demand * net.node(sol.assignment.at(v.id)).trust.value();
  }
}

/// Resource bookkeeping for an admitted request. Rejects invalid solutions
/// (validated against current residuals, trust families excluded) and leaves
/// the input untouched in that case.
inline SubstrateNetwork apply_embedding(const SubstrateNetwork& net, const ServiceRequest& req,
                                        const EmbeddingSolution& sol) {
  auto report = validate_solution(net, req, sol, TrustMode::None);
  if (!report.valid()) {
    throw std::invalid_argument("refusing to apply invalid solution: " + report.violations.front().family +
                                ": " + report.violations.front().what);
  }
  ResourceAllocation alloc;
  for (const auto& [i, u] : sol.assignment) {
    alloc.cpu_by_node[net.node_index(u)] += req.vnf(i).cpu_demand;
  }
  for (const auto& fa : sol.flows) {
    for (std::size_t i = 1; i < fa.path.node_seq.size(); ++i) {
      alloc.bw_by_link[*net.link_between(fa.path.node_seq[i - 1], fa.path.node_seq[i])] += fa.amount;
    }
  }
  SubstrateNetwork out = net;
  out.add_allocation(req.id(), std::move(alloc));
  return out;
}

/// Inverse of apply_embedding; residuals are restored exactly.
inline SubstrateNetwork release_embedding(const SubstrateNetwork& net, int request_id) {
  SubstrateNetwork out = net;
  out.remove_allocation(request_id);
  return out;
}

}  // namespace sfce
