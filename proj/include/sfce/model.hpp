#pragma once

// Solver-independent MILP construction for the path-based embedding models
// (exact and k-shortest-path restricted) and the node-link multicommodity
// flow baseline.

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sfce/net_model.hpp"
#include "sfce/pathspace.hpp"

namespace sfce {

enum class PbVariant { PbSce, PbNodeTrust, PbTasce };
enum class LinkVariant { Sce, NodeTrust };

inline EligibilityMode eligibility_mode(PbVariant v) {
  return v == PbVariant::PbSce ? EligibilityMode::TrustOff : EligibilityMode::TrustOn;
}

inline TrustMode trust_mode_of(PbVariant v) {
  switch (v) {
    case PbVariant::PbSce: return TrustMode::None;
    case PbVariant::PbNodeTrust: return TrustMode::NodeTrust;
    case PbVariant::PbTasce: return TrustMode::NodeAndLinkTrust;
  }
  return TrustMode::None;
}

enum class VarKind { Binary, Continuous };
enum class Relation { LessEq, GreaterEq, Equal };

struct LinearTerm {
  int var{};
  double coeff{};
};

struct Variable {
  std::string name;
  VarKind kind{VarKind::Continuous};
  double lb{0.0};
  double ub{std::numeric_limits<double>::infinity()};
  double obj{0.0};
};

struct ConstraintRow {
  std::string family;  // placement | demand | coupling_src | coupling_dst | cpu_cap | bw_cap | conservation
  std::string tag;     // row identity for validator cross-checks and dumps
  std::vector<LinearTerm> terms;
  Relation rel{Relation::LessEq};
  double rhs{0.0};
};

/// Abstract MILP: variables, tagged rows, minimization objective in the
/// variables' obj coefficients, plus the metadata needed to decode a point
/// back into an EmbeddingSolution.
struct EmbeddingModel {
  std::vector<Variable> vars;
  std::vector<ConstraintRow> rows;
  double gamma{1.0};
  TrustMode trust_mode{TrustMode::None};

  struct XRef {
    int vnf_id;
    int node_id;
  };
  std::map<int, XRef> x_of_var;      // var index -> assignment meaning
  std::map<int, long> path_of_var;   // var index -> augmented path id
  std::map<long, AugmentedPath> paths;  // path id -> path (copied from the universe)

  struct ArcRef {
    int vsrc, vdst;      // commodity
    std::size_t link;    // substrate link index
    bool forward;        // true: a->b traversal
  };
  std::map<int, ArcRef> arc_of_var;  // link-based flow vars

  bool trivially_infeasible{false};
  std::string infeasibility_reason;

  int add_var(Variable v) {
    vars.push_back(std::move(v));
    return static_cast<int>(vars.size()) - 1;
  }
};

/// Tightest valid coupling constant at VNF `i`: the total demand of the
/// commodities leaving (or entering) it.
enum class CouplingSide { Source, Destination };

inline double compute_big_M(const ServiceRequest& req, int vnf_id, CouplingSide side) {
  double m = 0;
  for (const auto& e : req.vlinks()) {
    if (side == CouplingSide::Source && e.src == vnf_id) m += e.bw_demand;
    if (side == CouplingSide::Destination && e.dst == vnf_id) m += e.bw_demand;
  }
  return m;
}

struct PbModelOptions {
  double gamma{1.0};
  double big_m_scale{1.0};          // multiplies the tight M (for robustness experiments)
  bool couple_destination{true};    // symmetric closure of the source-side coupling
};

namespace detail {

inline std::vector<int> eligible_placements(const SubstrateNetwork& net, const Vnf& v, EligibilityMode mode) {
  std::vector<int> out;
  for (const auto& n : net.nodes()) {
    if (eligible_host(net, n, v.cpu_demand, v.trust_req, mode)) out.push_back(n.id);
  }
  return out;
}

}  // namespace detail

/// Path-based model over a pre-built path universe. Node- and path-trust
/// requirements are enforced by variable elimination: ineligible x variables
/// are never created and under-trusted paths have their flow fixed at zero.
inline EmbeddingModel build_pb_model(const SubstrateNetwork& net, const ServiceRequest& req,
                                     const PathUniverse& universe, PbVariant variant,
                                     const PbModelOptions& opt = {}) {
  if (opt.gamma < 0) throw std::invalid_argument("gamma must be nonnegative");
  EmbeddingModel m;
  m.gamma = opt.gamma;
  m.trust_mode = trust_mode_of(variant);
  EligibilityMode emode = eligibility_mode(variant);

  // Flow variables; paths below the commodity's trust requirement are fixed
  // at zero under the full trust model.
  std::map<long, int> var_of_path;
  std::map<std::pair<int, int>, std::vector<long>> live_paths;  // commodity -> usable path ids
  for (const auto& e : req.vlinks()) {
    const auto& paths = universe.paths_for(e.src, e.dst);
    if (paths.empty()) {
      m.trivially_infeasible = true;
      m.infeasibility_reason = "no candidate path for commodity (" + std::to_string(e.src) + "," +
                               std::to_string(e.dst) + ")";
    }
    bool any_live = false;
    for (const auto& p : paths) {
      Variable fv;
      fv.name = "f[p" + std::to_string(p.id) + "]";
      fv.kind = VarKind::Continuous;
      fv.lb = 0.0;
      fv.obj = p.cost;
      bool trusted = variant != PbVariant::PbTasce || p.trust.value() >= e.trust_req.value();
      if (!trusted) fv.ub = 0.0;
      int vi = m.add_var(fv);
      m.path_of_var[vi] = p.id;
      m.paths[p.id] = p;
      var_of_path[p.id] = vi;
      if (trusted) {
        live_paths[{e.src, e.dst}].push_back(p.id);
        any_live = true;
      }
    }
    if (!paths.empty() && !any_live && e.bw_demand > 0 && !m.trivially_infeasible) {
      m.trivially_infeasible = true;
      m.infeasibility_reason = "path_trust eliminates every candidate path for commodity (" +
                               std::to_string(e.src) + "," + std::to_string(e.dst) + ")";
    }
  }

  // Placement variables. Hosts that cannot source/sink a positive-demand
  // commodity of this VNF within the path universe are pruned: coupling
  // would force such a placement infeasible anyway.
  std::map<std::pair<int, int>, int> var_of_x;  // (vnf,node) -> var
  for (const auto& v : req.vnfs()) {
    auto hosts = detail::eligible_placements(net, v, emode);
    std::vector<int> kept;
    for (int u : hosts) {
      bool ok = true;
      for (const auto& e : req.vlinks()) {
        if (e.bw_demand <= 0) continue;
        bool incident_src = e.src == v.id;
        bool incident_dst = e.dst == v.id;
        if (!incident_src && !incident_dst) continue;
        bool reachable = false;
        for (long pid : live_paths[{e.src, e.dst}]) {
          const auto& p = m.paths[pid];
          if ((incident_src && p.host_src == u) || (incident_dst && p.host_dst == u)) {
            reachable = true;
            break;
          }
        }
        if (!reachable) {
          ok = false;
          break;
        }
      }
      if (ok) kept.push_back(u);
    }
    if (kept.empty() && !m.trivially_infeasible) {
      m.trivially_infeasible = true;
      m.infeasibility_reason = "no eligible host for vnf " + std::to_string(v.id);
    }
    for (int u : kept) {
      Variable xv;
      xv.name = "x[" + std::to_string(v.id) + "," + std::to_string(u) + "]";
      xv.kind = VarKind::Binary;
      xv.lb = 0.0;
      xv.ub = 1.0;
      xv.obj = opt.gamma * net.node(u).trust.value();
      int vi = m.add_var(xv);
      m.x_of_var[vi] = {v.id, u};
      var_of_x[{v.id, u}] = vi;
    }
  }

  // placement: each VNF on exactly one host.
  for (const auto& v : req.vnfs()) {
    ConstraintRow row;
    row.family = "placement";
    row.tag = "placement[vnf=" + std::to_string(v.id) + "]";
    row.rel = Relation::Equal;
    row.rhs = 1.0;
    for (const auto& [key, vi] : var_of_x) {
      if (key.first == v.id) row.terms.push_back({vi, 1.0});
    }
    m.rows.push_back(std::move(row));
  }

  // demand: commodity flows sum to the demand.
  for (const auto& e : req.vlinks()) {
    ConstraintRow row;
    row.family = "demand";
    row.tag = "demand[" + std::to_string(e.src) + "," + std::to_string(e.dst) + "]";
    row.rel = Relation::Equal;
    row.rhs = e.bw_demand;
    for (const auto& p : universe.paths_for(e.src, e.dst)) row.terms.push_back({var_of_path[p.id], 1.0});
    m.rows.push_back(std::move(row));
  }

  // coupling: flow may leave (enter) a host only when the commodity endpoint
  // is placed there.
  auto add_coupling = [&](int vnf_id, int host, CouplingSide side) {
    std::vector<LinearTerm> terms;
    for (const auto& e : req.vlinks()) {
      bool incident = side == CouplingSide::Source ? e.src == vnf_id : e.dst == vnf_id;
      if (!incident) continue;
      for (const auto& p : universe.paths_for(e.src, e.dst)) {
        int anchor = side == CouplingSide::Source ? p.host_src : p.host_dst;
        if (anchor == host) terms.push_back({var_of_path[p.id], 1.0});
      }
    }
    if (terms.empty()) return;
    double big_m = compute_big_M(req, vnf_id, side) * opt.big_m_scale;
    ConstraintRow row;
    row.family = side == CouplingSide::Source ? "coupling_src" : "coupling_dst";
    row.tag = row.family + "[" + std::to_string(vnf_id) + "," + std::to_string(host) + "]";
    row.rel = Relation::LessEq;
    row.rhs = 0.0;
    row.terms = std::move(terms);
    auto xit = var_of_x.find({vnf_id, host});
    if (xit != var_of_x.end()) {
      row.terms.push_back({xit->second, -big_m});
    }
    // No placement variable: the flow through this host is simply forbidden.
    m.rows.push_back(std::move(row));
  };
  for (const auto& v : req.vnfs()) {
    std::set<int> src_hosts, dst_hosts;
    for (const auto& e : req.vlinks()) {
      for (const auto& p : universe.paths_for(e.src, e.dst)) {
        if (e.src == v.id) src_hosts.insert(p.host_src);
        if (e.dst == v.id) dst_hosts.insert(p.host_dst);
      }
    }
    for (int u : src_hosts) add_coupling(v.id, u, CouplingSide::Source);
    if (opt.couple_destination) {
      for (int u : dst_hosts) add_coupling(v.id, u, CouplingSide::Destination);
    }
  }

  // cpu capacity per server with at least one placement variable.
  std::map<int, std::vector<LinearTerm>> cpu_terms;
  for (const auto& [key, vi] : var_of_x) {
    cpu_terms[key.second].push_back({vi, req.vnf(key.first).cpu_demand});
  }
  for (auto& [u, terms] : cpu_terms) {
    ConstraintRow row;
    row.family = "cpu_cap";
    row.tag = "cpu_cap[node=" + std::to_string(u) + "]";
    row.rel = Relation::LessEq;
    row.rhs = net.residual_cpu(u);
    row.terms = std::move(terms);
    m.rows.push_back(std::move(row));
  }

  // bandwidth capacity per undirected substrate link, both directions summed.
  std::map<std::size_t, std::vector<LinearTerm>> bw_terms;
  for (const auto& [pid, vi] : var_of_path) {
    const auto& p = m.paths[pid];
    for (std::size_t i = 1; i < p.node_seq.size(); ++i) {
      bw_terms[*net.link_between(p.node_seq[i - 1], p.node_seq[i])].push_back({vi, 1.0});
    }
  }
  for (auto& [li, terms] : bw_terms) {
    const auto& l = net.links()[li];
    ConstraintRow row;
    row.family = "bw_cap";
    row.tag = "bw_cap[link=" + std::to_string(l.a) + "-" + std::to_string(l.b) + "]";
    row.rel = Relation::LessEq;
    row.rhs = net.residual_bw(li);
    row.terms = std::move(terms);
    m.rows.push_back(std::move(row));
  }

  return m;
}

/// Node-link multicommodity-flow baseline: per-commodity arc flows with
/// conservation tying net outflow to the placement of the commodity
/// endpoints. Exact over all substrate links, no path pre-selection.
inline EmbeddingModel build_link_based_model(const SubstrateNetwork& net, const ServiceRequest& req,
                                             LinkVariant variant, double gamma = 1.0) {
  EmbeddingModel m;
  m.gamma = gamma;
  m.trust_mode = variant == LinkVariant::Sce ? TrustMode::None : TrustMode::NodeTrust;
  EligibilityMode emode =
      variant == LinkVariant::Sce ? EligibilityMode::TrustOff : EligibilityMode::TrustOn;

  std::map<std::pair<int, int>, int> var_of_x;
  for (const auto& v : req.vnfs()) {
    auto hosts = detail::eligible_placements(net, v, emode);
    if (hosts.empty()) {
      m.trivially_infeasible = true;
      m.infeasibility_reason = "no eligible host for vnf " + std::to_string(v.id);
    }
    for (int u : hosts) {
      Variable xv;
      xv.name = "x[" + std::to_string(v.id) + "," + std::to_string(u) + "]";
      xv.kind = VarKind::Binary;
      xv.ub = 1.0;
      xv.obj = gamma * net.node(u).trust.value();
      int vi = m.add_var(xv);
      m.x_of_var[vi] = {v.id, u};
      var_of_x[{v.id, u}] = vi;
    }
  }

  // One flow variable per commodity and directed traversal of each link.
  std::map<std::tuple<int, int, std::size_t, bool>, int> var_of_arc;
  for (const auto& e : req.vlinks()) {
    for (std::size_t li = 0; li < net.links().size(); ++li) {
      for (bool forward : {true, false}) {
        Variable fv;
        const auto& l = net.links()[li];
        fv.name = "f[" + std::to_string(e.src) + "," + std::to_string(e.dst) + ";" +
                  std::to_string(forward ? l.a : l.b) + "->" + std::to_string(forward ? l.b : l.a) + "]";
        fv.kind = VarKind::Continuous;
        fv.obj = 1.0;  // unit transport cost per substrate hop
        int vi = m.add_var(fv);
        m.arc_of_var[vi] = {e.src, e.dst, li, forward};
        var_of_arc[{e.src, e.dst, li, forward}] = vi;
      }
    }
  }

  for (const auto& v : req.vnfs()) {
    ConstraintRow row;
    row.family = "placement";
    row.tag = "placement[vnf=" + std::to_string(v.id) + "]";
    row.rel = Relation::Equal;
    row.rhs = 1.0;
    for (const auto& [key, vi] : var_of_x) {
      if (key.first == v.id) row.terms.push_back({vi, 1.0});
    }
    m.rows.push_back(std::move(row));
  }

  // Flow conservation: net outflow at u equals d*(x[i,u] - x[j,u]).
  for (const auto& e : req.vlinks()) {
    for (const auto& n : net.nodes()) {
      ConstraintRow row;
      row.family = "conservation";
      row.tag = "conservation[" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                ";node=" + std::to_string(n.id) + "]";
      row.rel = Relation::Equal;
      row.rhs = 0.0;
      for (std::size_t li : net.links_at(n.id)) {
        const auto& l = net.links()[li];
        bool forward_out = l.a == n.id;  // forward arc leaves n iff n is endpoint a
        row.terms.push_back({var_of_arc[{e.src, e.dst, li, forward_out}], 1.0});
        row.terms.push_back({var_of_arc[{e.src, e.dst, li, !forward_out}], -1.0});
      }
      if (auto it = var_of_x.find({e.src, n.id}); it != var_of_x.end()) {
        row.terms.push_back({it->second, -e.bw_demand});
      }
      if (auto it = var_of_x.find({e.dst, n.id}); it != var_of_x.end()) {
        row.terms.push_back({it->second, e.bw_demand});
      }
      m.rows.push_back(std::move(row));
    }
  }

  std::map<int, std::vector<LinearTerm>> cpu_terms;
  for (const auto& [key, vi] : var_of_x) {
    cpu_terms[key.second].push_back({vi, req.vnf(key.first).cpu_demand});
  }
  for (auto& [u, terms] : cpu_terms) {
    ConstraintRow row;
    row.family = "cpu_cap";
    row.tag = "cpu_cap[node=" + std::to_string(u) + "]";
    row.rel = Relation::LessEq;
    row.rhs = net.residual_cpu(u);
    row.terms = std::move(terms);
    m.rows.push_back(std::move(row));
  }

  for (std::size_t li = 0; li < net.links().size(); ++li) {
    const auto& l = net.links()[li];
    ConstraintRow row;
    row.family = "bw_cap";
    row.tag = "bw_cap[link=" + std::to_string(l.a) + "-" + std::to_string(l.b) + "]";
    row.rel = Relation::LessEq;
    row.rhs = net.residual_bw(li);
    for (const auto& e : req.vlinks()) {
      row.terms.push_back({var_of_arc[{e.src, e.dst, li, true}], 1.0});
      row.terms.push_back({var_of_arc[{e.src, e.dst, li, false}], 1.0});
    }
    m.rows.push_back(std::move(row));
  }

  return m;
}

/// Plain-text dump, one tagged row per line, for debugging and cross-solver
/// comparisons.
inline std::string dump_model(const EmbeddingModel& m) {
  std::ostringstream os;
  os << "minimize:";
  for (std::size_t i = 0; i < m.vars.size(); ++i) {
    if (m.vars[i].obj != 0) os << " + " << m.vars[i].obj << " " << m.vars[i].name;
  }
  os << "\n";
  for (const auto& row : m.rows) {
    os << row.tag << ":";
    for (const auto& t : row.terms) {
      os << " " << (t.coeff >= 0 ? "+" : "-") << " " << std::abs(t.coeff) << " " << m.vars[t.var].name;
    }
    os << (row.rel == Relation::LessEq ? " <= " : row.rel == Relation::GreaterEq ? " >= " : " = ");
    os << row.rhs << "\n";
  }
  for (const auto& v : m.vars) {
    os << v.name << " in "
       << (v.kind == VarKind::Binary ? "{0,1}" : "[" + std::to_string(v.lb) + ", +inf)");
    if (v.kind == VarKind::Continuous && v.ub != std::numeric_limits<double>::infinity()) {
      os << " ub=" << v.ub;
    }
    os << "\n";
  }
  if (m.trivially_infeasible) os << "infeasible: " << m.infeasibility_reason << "\n";
  return os.str();
}

}  // namespace sfce
