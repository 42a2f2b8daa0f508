#pragma once

// Exact solution of EmbeddingModel instances: LP relaxation, best-first
// branch-and-bound on the placement binaries, and an exhaustive
// desk-scale oracle used for cross-checking.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "sfce/model.hpp"
#include "sfce/net_model.hpp"
#include "sfce/pathspace.hpp"
#include "sfce/simplex.hpp"

namespace sfce {

inline constexpr double kIntTol = 1e-6;
inline constexpr double kObjTol = 1e-6;

enum class SolveStatus { Optimal, Infeasible, Timeout, NumericalFailure };

struct SolveStats {
  long nodes_explored{0};
  long lp_iterations{0};
  double wall_time_s{0.0};
};

struct SolveResult {
  SolveStatus status{SolveStatus::Infeasible};
  std::optional<EmbeddingSolution> solution;
  double objective{std::numeric_limits<double>::infinity()};
  double gap{std::numeric_limits<double>::infinity()};  // only meaningful on timeout
  std::string detail;
  SolveStats stats;
};

struct SolveBudget {
  double time_limit_s{10.0};
  long node_limit{200000};
};

/// Context needed to turn raw variable values back into a solution; the
/// trust evaluator is used for paths reconstructed from arc flows.
struct ExtractionContext {
  PathTrustPolicy policy{PathTrustPolicy::MinLink};
  const PathTrustTable* trust_table{nullptr};
};

namespace detail {

inline LpProblem to_lp(const EmbeddingModel& m, bool drop_covered_binary_ubs = false) {
  // A binary under a placement equality (unit coefficients, nonnegative
  // variables) already satisfies x <= 1; dropping the explicit bound saves
  // one row each in the tableau.
  std::vector<bool> covered(m.vars.size(), false);
  if (drop_covered_binary_ubs) {
    for (const auto& r : m.rows) {
      if (r.family != "placement" || r.rel != Relation::Equal || r.rhs != 1.0) continue;
      bool unit = true;
      for (const auto& t : r.terms) unit = unit && t.coeff == 1.0;
      if (!unit) continue;
      for (const auto& t : r.terms) covered[static_cast<std::size_t>(t.var)] = true;
    }
  }
  LpProblem p;
  p.objective.reserve(m.vars.size());
  for (std::size_t vi = 0; vi < m.vars.size(); ++vi) {
    const auto& v = m.vars[vi];
    p.objective.push_back(v.obj);
    p.lower.push_back(v.lb);
    p.upper.push_back(v.kind == VarKind::Binary && covered[vi] && v.lb == 0.0
                          ? std::numeric_limits<double>::infinity()
                          : v.ub);
  }
  p.rows.reserve(m.rows.size());
  for (const auto& r : m.rows) {
    LpConstraint c;
    c.rhs = r.rhs;
    c.sense = r.rel == Relation::LessEq   ? RowSense::LessEq
              : r.rel == Relation::Equal ? RowSense::Equal
                                         : RowSense::GreaterEq;
    for (const auto& t : r.terms) c.terms.push_back({t.var, t.coeff});
    p.rows.push_back(std::move(c));
  }
  return p;
}

// Path-flow reconstruction for the node-link model: peel source-to-sink
// paths off the per-commodity arc flows. Minimal-cost flows carry no cycles
// (every arc costs one hop), so the peeling consumes the whole flow.
inline std::vector<FlowAllocation> decompose_arc_flows(const SubstrateNetwork& net,
                                                       const ServiceRequest& req,
                                                       const EmbeddingModel& m,
                                                       const std::vector<double>& x,
                                                       const std::map<int, int>& assignment,
                                                       const ExtractionContext& ctx) {
  std::vector<FlowAllocation> flows;
  long next_id = 0;
  for (const auto& e : req.vlinks()) {
    int src = assignment.at(e.src);
    int dst = assignment.at(e.dst);
    // arc flow: (node a -> node b) keyed by directed pair.
    std::map<std::pair<int, int>, double> arc;
    for (const auto& [vi, ref] : m.arc_of_var) {
      if (ref.vsrc != e.src || ref.vdst != e.dst) continue;
      double f = x[static_cast<std::size_t>(vi)];
      if (f <= kIntTol) continue;
      const auto& l = net.links()[ref.link];
      arc[{ref.forward ? l.a : l.b, ref.forward ? l.b : l.a}] += f;
    }
    if (src == dst) {
      AugmentedPath p;
      p.id = -(++next_id);
      p.vsrc = e.src;
      p.vdst = e.dst;
      p.host_src = p.host_dst = src;
      p.node_seq = {src};
      p.cost = 0;
      p.trust = TrustValue(1.0);
      flows.push_back({std::move(p), e.bw_demand});
      continue;
    }
    double remaining = e.bw_demand;
    while (remaining > 1e-7) {
      // BFS over positive arcs, fewest hops first, smallest node id tie-break.
      std::map<int, int> pred;
      std::deque<int> q{src};
      pred[src] = src;
      while (!q.empty() && !pred.count(dst)) {
        int u = q.front();
        q.pop_front();
        std::vector<int> nexts;
        for (const auto& [key, f] : arc) {
          if (key.first == u && f > 1e-9 && !pred.count(key.second)) nexts.push_back(key.second);
        }
        std::sort(nexts.begin(), nexts.end());
        for (int v : nexts) {
          pred[v] = u;
          q.push_back(v);
        }
      }
      if (!pred.count(dst)) {
        throw std::runtime_error("arc flow decomposition stalled; residual demand " +
                                 std::to_string(remaining));
      }
      std::vector<int> seq;
      for (int u = dst;; u = pred[u]) {
        seq.push_back(u);
        if (u == src) break;
      }
      std::reverse(seq.begin(), seq.end());
      double amount = remaining;
      for (std::size_t i = 1; i < seq.size(); ++i) amount = std::min(amount, arc[{seq[i - 1], seq[i]}]);
      for (std::size_t i = 1; i < seq.size(); ++i) arc[{seq[i - 1], seq[i]}] -= amount;
      AugmentedPath p;
      p.id = -(++next_id);
      p.vsrc = e.src;
      p.vdst = e.dst;
      p.host_src = src;
      p.host_dst = dst;
      p.node_seq = seq;
      p.cost = static_cast<double>(seq.size() - 1);
      p.trust = path_trust(net, p, ctx.policy == PathTrustPolicy::Assigned && ctx.trust_table == nullptr
                                        ? PathTrustPolicy::MinLink
                                        : ctx.policy,
                           ctx.trust_table);
      flows.push_back({std::move(p), amount});
      remaining -= amount;
    }
  }
  return flows;
}

inline EmbeddingSolution extract_solution(const SubstrateNetwork& net, const ServiceRequest& req,
                                          const EmbeddingModel& m, const std::vector<double>& x,
                                          double objective, const ExtractionContext& ctx) {
  EmbeddingSolution sol;
  for (const auto& [vi, ref] : m.x_of_var) {
    if (x[static_cast<std::size_t>(vi)] > 0.5) sol.assignment[ref.vnf_id] = ref.node_id;
  }
  if (!m.arc_of_var.empty()) {
    sol.flows = decompose_arc_flows(net, req, m, x, sol.assignment, ctx);
  } else {
    for (const auto& [vi, pid] : m.path_of_var) {
      double f = x[static_cast<std::size_t>(vi)];
      if (f > kIntTol) sol.flows.push_back({m.paths.at(pid), f});
    }
  }
  sol.objective_value = objective;
  fill_accounting(net, req, sol);
  return sol;
}

}  // namespace detail

/// LP relaxation of the model (binaries relaxed to [0,1]).
inline LpResult solve_lp_relaxation(const EmbeddingModel& m) {
  return solve_lp(detail::to_lp(m));
}

/// A known feasible embedding used as the initial incumbent; B&B then only
/// has to prove optimality or find something strictly better.
struct WarmStart {
  const EmbeddingSolution* solution{nullptr};
  double objective{std::numeric_limits<double>::infinity()};
};

/// Exact branch-and-bound: best-first on the LP bound, branching on the most
/// fractional placement variable. Flow variables are never branched.
inline SolveResult solve_milp(const SubstrateNetwork& net, const ServiceRequest& req,
                              const EmbeddingModel& m, const SolveBudget& budget = {},
                              const ExtractionContext& ctx = {}, const WarmStart& warm = {}) {
  auto t0 = std::chrono::steady_clock::now();
  SolveResult result;
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  if (m.trivially_infeasible) {
    result.status = SolveStatus::Infeasible;
    result.detail = m.infeasibility_reason;
    result.stats.wall_time_s = elapsed();
    return result;
  }

  LpProblem base = detail::to_lp(m, true);

  struct Node {
    double bound;
    long seq;
    std::vector<std::pair<int, double>> fixings;  // var -> value
    // Best bound first; among equal bounds dive to the deepest node (finds
    // integral incumbents early), then FIFO for determinism.
    bool operator<(const Node& o) const {
      if (bound != o.bound) return bound > o.bound;  // min-heap via priority_queue
      if (fixings.size() != o.fixings.size()) return fixings.size() < o.fixings.size();
      return seq > o.seq;
    }
  };
  std::priority_queue<Node> open;
  long seq = 0;
  open.push({-std::numeric_limits<double>::infinity(), seq++, {}});

  double incumbent_obj = warm.solution ? warm.objective : std::numeric_limits<double>::infinity();
  std::optional<std::vector<double>> incumbent_x;
  double best_bound = std::numeric_limits<double>::infinity();

  while (!open.empty()) {
    if (elapsed() > budget.time_limit_s || result.stats.nodes_explored >= budget.node_limit) {
      result.status = SolveStatus::Timeout;
      best_bound = open.top().bound;
      break;
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent_obj - kObjTol) continue;  // pruned by incumbent
    ++result.stats.nodes_explored;

    LpProblem p = base;
    for (auto [vi, val] : node.fixings) {
      p.lower[static_cast<std::size_t>(vi)] = val;
      p.upper[static_cast<std::size_t>(vi)] = val;
    }
    LpResult lp = solve_lp(p);
    result.stats.lp_iterations += lp.iterations;
    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status != LpStatus::Optimal) {
      result.status = SolveStatus::NumericalFailure;
      result.detail = "LP relaxation did not converge at a search node";
      result.stats.wall_time_s = elapsed();
      return result;
    }
    if (lp.objective >= incumbent_obj - kObjTol) continue;

    // Most fractional binary; ties toward the lowest variable index.
    int branch_var = -1;
    double best_frac = kIntTol;
    for (const auto& [vi, ref] : m.x_of_var) {
      (void)ref;
      double v = lp.x[static_cast<std::size_t>(vi)];
      double frac = std::min(v, 1.0 - v);
      if (frac > best_frac) {
        best_frac = frac;
        branch_var = vi;
      }
    }
    if (branch_var == -1) {
      // Integral: new incumbent.
      if (lp.objective < incumbent_obj - kObjTol) {
        incumbent_obj = lp.objective;
        incumbent_x = lp.x;
      }
      continue;
    }
    for (double val : {1.0, 0.0}) {
      auto fix = node.fixings;
      fix.push_back({branch_var, val});
      open.push({lp.objective, seq++, std::move(fix)});
    }
  }

  result.stats.wall_time_s = elapsed();
  if (incumbent_x || warm.solution) {
    result.objective = incumbent_obj;
    if (incumbent_x) {
      result.solution = detail::extract_solution(net, req, m, *incumbent_x, incumbent_obj, ctx);
    } else {
      result.solution = *warm.solution;  // nothing in the tree beat the warm start
    }
    if (result.status != SolveStatus::Timeout) {
      result.status = SolveStatus::Optimal;
      result.gap = 0.0;
    } else {
      result.gap = incumbent_obj == 0 ? std::abs(incumbent_obj - best_bound)
                                      : (incumbent_obj - best_bound) / std::abs(incumbent_obj);
    }
  } else if (result.status != SolveStatus::Timeout) {
    result.status = SolveStatus::Infeasible;
  }
  return result;
}

struct OracleOptions {
  long assignment_cap{100000};
  double gamma{1.0};
};

/// Exhaustive assignment enumeration with an LP over the full simple-path
/// universe for each assignment. Independent of the branch-and-bound search;
/// desk-scale instances only.
inline SolveResult brute_force_oracle(const SubstrateNetwork& net, const ServiceRequest& req,
                                      PbVariant variant, PathTrustPolicy policy,
                                      const PathTrustTable* table = nullptr,
                                      const OracleOptions& opt = {}) {
  auto t0 = std::chrono::steady_clock::now();
  EligibilityMode emode = eligibility_mode(variant);
  PathUniverse universe = build_path_universe(net, req, kUnlimitedPaths, emode, policy, table);

  std::vector<std::vector<int>> hosts;  // eligible hosts per vnf
  long combos = 1;
  for (const auto& v : req.vnfs()) {
    std::vector<int> eligible;
    for (const auto& n : net.nodes()) {
      if (eligible_host(net, n, v.cpu_demand, v.trust_req, emode)) eligible.push_back(n.id);
    }
    hosts.push_back(std::move(eligible));
    if (hosts.back().empty()) combos = 0;
    if (combos > 0) combos *= static_cast<long>(hosts.back().size());
    if (combos > opt.assignment_cap) {
      throw std::runtime_error("oracle refuses: assignment space exceeds cap");
    }
  }

  SolveResult result;
  result.status = SolveStatus::Infeasible;

  const auto& vnfs = req.vnfs();
  std::vector<int> pick(vnfs.size(), 0);
  std::map<int, double> cpu_load;

  std::function<void(std::size_t)> recurse = [&](std::size_t depth) {
    if (depth == vnfs.size()) {
      // Flow LP for this assignment.
      std::map<int, int> assign;
      for (std::size_t i = 0; i < vnfs.size(); ++i) assign[vnfs[i].id] = hosts[i][pick[i]];

      LpProblem p;
      std::vector<const AugmentedPath*> lp_paths;
      std::map<std::size_t, std::vector<std::pair<int, double>>> bw_terms;
      std::vector<LpConstraint> demand_rows;
      for (const auto& e : req.vlinks()) {
        LpConstraint demand;
        demand.sense = RowSense::Equal;
        demand.rhs = e.bw_demand;
        for (const auto& path : universe.paths_for(e.src, e.dst)) {
          if (path.host_src != assign[e.src] || path.host_dst != assign[e.dst]) continue;
          if (variant == PbVariant::PbTasce && path.trust.value() < e.trust_req.value()) continue;
          int vi = static_cast<int>(p.objective.size());
          p.objective.push_back(path.cost);
          p.lower.push_back(0.0);
          p.upper.push_back(std::numeric_limits<double>::infinity());
          lp_paths.push_back(&path);
          demand.terms.push_back({vi, 1.0});
          for (std::size_t i = 1; i < path.node_seq.size(); ++i) {
            bw_terms[*net.link_between(path.node_seq[i - 1], path.node_seq[i])].push_back({vi, 1.0});
          }
        }
        if (demand.terms.empty() && e.bw_demand > 0) return;  // no usable path
        demand_rows.push_back(std::move(demand));
      }
      p.rows = std::move(demand_rows);
      for (auto& [li, terms] : bw_terms) {
        LpConstraint cap;
        cap.sense = RowSense::LessEq;
        cap.rhs = net.residual_bw(li);
        cap.terms = std::move(terms);
        p.rows.push_back(std::move(cap));
      }
      LpResult lp = solve_lp(p);
      result.stats.lp_iterations += lp.iterations;
      if (lp.status != LpStatus::Optimal) return;
      double total = lp.objective;
      for (const auto& [i, u] : assign) {
        (void)i;
        total += opt.gamma * net.node(u).trust.value();
      }
      if (total < result.objective - kObjTol) {
        result.objective = total;
        EmbeddingSolution sol;
        sol.assignment = assign;
        for (std::size_t j = 0; j < lp_paths.size(); ++j) {
          if (lp.x[j] > kIntTol) sol.flows.push_back({*lp_paths[j], lp.x[j]});
        }
        sol.objective_value = total;
        fill_accounting(net, req, sol);
        result.solution = std::move(sol);
        result.status = SolveStatus::Optimal;
      }
      return;
    }
    for (std::size_t h = 0; h < hosts[depth].size(); ++h) {
      int u = hosts[depth][h];
      double g = vnfs[depth].cpu_demand;
      if (cpu_load[u] + g > net.residual_cpu(u)) continue;
      cpu_load[u] += g;
      pick[depth] = static_cast<int>(h);
      recurse(depth + 1);
      cpu_load[u] -= g;
    }
  };
  if (combos > 0) recurse(0);

  result.stats.nodes_explored = combos;
  result.stats.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (result.status == SolveStatus::Optimal) result.gap = 0.0;
  return result;
}

}  // namespace sfce
