#pragma once

// Discrete-event harness: admits arriving service chains through a chosen
// embedding method, applies and releases substrate resources, and
// accumulates windowed metrics.

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include "sfce/model.hpp"
#include "sfce/net_model.hpp"
#include "sfce/solver.hpp"
#include "sfce/workload.hpp"

namespace sfce {

enum class MethodKind { LinkBased, Kpb };

struct Method {
  MethodKind kind{MethodKind::Kpb};
  int k{12};
  PbVariant variant{PbVariant::PbSce};
  LinkVariant link_variant{LinkVariant::Sce};

  std::string name() const {
    if (kind == MethodKind::LinkBased) {
      return link_variant == LinkVariant::Sce ? "link-based" : "link-based-node-trust";
    }
    std::string suffix = variant == PbVariant::PbSce        ? "sce"
                         : variant == PbVariant::PbNodeTrust ? "node-trust"
                                                             : "tasce";
    return std::to_string(k) + "-pb-" + suffix;
  }

  TrustMode trust_mode() const {
    if (kind == MethodKind::LinkBased) {
      return link_variant == LinkVariant::Sce ? TrustMode::None : TrustMode::NodeTrust;
    }
    return trust_mode_of(variant);
  }
};

inline Method method_from_config(const ExperimentConfig& cfg) {
  Method m;
  m.k = cfg.k;
  if (cfg.variant == "link_based") {
    m.kind = MethodKind::LinkBased;
    m.link_variant = LinkVariant::Sce;
  } else if (cfg.variant == "link_node_trust") {
    m.kind = MethodKind::LinkBased;
    m.link_variant = LinkVariant::NodeTrust;
  } else if (cfg.variant == "pb_sce") {
    m.variant = PbVariant::PbSce;
  } else if (cfg.variant == "pb_node_trust") {
    m.variant = PbVariant::PbNodeTrust;
  } else if (cfg.variant == "pb_tasce") {
    m.variant = PbVariant::PbTasce;
  } else {
    throw std::invalid_argument("unknown variant '" + cfg.variant + "'");
  }
  return m;
}

struct RequestRecord {
  int id{};
  double arrival_time{}, holding_time{};
  int vnf_count{};
  double cpu_demand{}, bw_demand{};
  bool accepted{false};
  std::string reject_reason;  // "", "infeasible", "timeout", "numerical_failure"
  double objective{}, bw_revenue{}, bw_cost{}, cpu_revenue{}, cpu_cost{};
  long nodes_explored{}, lp_iterations{};
  double solve_time_s{};
};

struct WindowMetrics {
  double t_begin{}, t_end{};
  int arrivals{}, accepted{};
  double acceptance_ratio{};  // 0 when the window saw no arrivals
  double cpu_utilization{};   // time-weighted fraction of total server CPU in use
  double cpu_in_service{};    // time-weighted GHz*cores hosted (background excluded)
  double bw_in_service{};     // time-weighted Mbps of admitted demand being hosted
  double bw_revenue{}, bw_cost{}, cpu_revenue{}, cpu_cost{};
};

struct MetricsSeries {
  std::vector<WindowMetrics> windows;
  std::vector<RequestRecord> requests;
  std::map<int, int> accepted_size_histogram;  // VNF count -> accepted requests

  int total_arrivals{}, total_accepted{};
  int rejected_infeasible{}, rejected_timeout{};
  double initial_utilization{};

  // Second half of the run.
  double steady_acceptance{};
  double steady_utilization{};
  double steady_cpu_in_service{};  // time-weighted mean hosted GHz*cores
  double steady_bw_in_service{};   // time-weighted mean hosted Mbps
  double steady_bw_revenue{}, steady_bw_cost{}, steady_cpu_revenue{}, steady_cpu_cost{};
  int steady_arrivals{}, steady_accepted{};
};

/// The substrate, timed request stream, and trust seed shared by every
/// method in a comparison (stream-sharing contract).
struct SimulationInput {
  SubstrateNetwork net;
  std::vector<ServiceRequest> requests;  // ordered by arrival time
  std::uint64_t trust_seed{};
};

inline SimulationInput make_simulation_input(const ExperimentConfig& cfg) {
  cfg.validate();
  SimulationInput input;
  input.net = generate_fat_tree_zone(cfg);
  RandomStream arrivals(cfg.seed, "arrivals");
  RandomStream requests(cfg.seed, "requests");
  double t = 0.0;
  for (int i = 0; i < cfg.request_count; ++i) {
    t += arrivals.exponential(cfg.mean_interarrival);
    double holding = arrivals.exponential(cfg.mean_holding);
    input.requests.push_back(generate_request(cfg, requests, i, t, holding));
  }
  input.trust_seed = RandomStream(cfg.seed, "path-trust").base_seed();
  return input;
}

namespace detail {

// Stamp the keyed-hash trust draw onto every enumerated path, so a substrate
// path carries the same trust in every universe that discovers it.
inline void stamp_path_trusts(PathUniverse& universe, std::uint64_t trust_seed, Bounds bounds) {
  for (auto& [key, paths] : universe.mutable_by_commodity()) {
    (void)key;
    for (auto& p : paths) {
      if (p.is_colocation()) continue;
      std::string pk = path_trust_key(p);
      p.trust = TrustValue(bounds.low + (bounds.high - bounds.low) * hashed_unit(trust_seed, pk));
    }
  }
}

struct SimEvent {
  double time;
  int kind;  // 0 = departure, 1 = arrival: departures first on time ties
  int id;
  bool operator>(const SimEvent& o) const {
    if (time != o.time) return time > o.time;
    if (kind != o.kind) return kind > o.kind;
    return id > o.id;
  }
};

}  // namespace detail

/// One method over one shared input. Deterministic: the event order, solver
/// and bookkeeping contain no unseeded randomness.
inline MetricsSeries run_simulation(const ExperimentConfig& cfg, const Method& method,
                                    const SimulationInput& input) {
  SubstrateNetwork net = input.net;
  MetricsSeries out;
  out.initial_utilization =
      net.total_server_cpu() > 0 ? net.cpu_in_use_total() / net.total_server_cpu() : 0.0;

  std::priority_queue<detail::SimEvent, std::vector<detail::SimEvent>, std::greater<detail::SimEvent>> events;
  std::map<int, const ServiceRequest*> by_id;
  for (const auto& req : input.requests) {
    events.push({req.arrival_time(), 1, req.id()});
    by_id[req.id()] = &req;
  }

  // Time-weighted utilization and in-service demand, folded into windows of
  // cfg.window.
  double now = 0.0;
  std::size_t cur_window = 0;
  double window_integral = 0.0;
  double window_cpu_svc = 0.0, window_bw_svc = 0.0;
  const double initial_cpu_in_use = net.cpu_in_use_total();
  double bw_in_service = 0.0;
  std::map<int, double> bw_of_request;
  auto window_end = [&](std::size_t w) { return cfg.window * static_cast<double>(w + 1); };
  auto ensure_window = [&](std::size_t w) {
    while (out.windows.size() <= w) {
      WindowMetrics wm;
      wm.t_begin = cfg.window * static_cast<double>(out.windows.size());
      wm.t_end = wm.t_begin + cfg.window;
      out.windows.push_back(wm);
    }
  };
  auto utilization = [&] {
    return net.total_server_cpu() > 0 ? net.cpu_in_use_total() / net.total_server_cpu() : 0.0;
  };
  auto advance_to = [&](double t) {
    double u = utilization();
    double cpu_svc = net.cpu_in_use_total() - initial_cpu_in_use;
    while (now < t) {
      double boundary = std::min(t, window_end(cur_window));
      double dt = boundary - now;
      window_integral += dt * u;
      window_cpu_svc += dt * cpu_svc;
      window_bw_svc += dt * bw_in_service;
      now = boundary;
      if (now == window_end(cur_window) && now < t) {
        ensure_window(cur_window);
        out.windows[cur_window].cpu_utilization = window_integral / cfg.window;
        out.windows[cur_window].cpu_in_service = window_cpu_svc / cfg.window;
        out.windows[cur_window].bw_in_service = window_bw_svc / cfg.window;
        window_integral = window_cpu_svc = window_bw_svc = 0.0;
        ++cur_window;
      }
    }
  };

  SolveBudget budget;
  budget.time_limit_s = cfg.solver_time_limit_s;

  while (!events.empty()) {
    auto ev = events.top();
    events.pop();
    advance_to(ev.time);
    if (ev.kind == 0) {
      net = release_embedding(net, ev.id);
      bw_in_service -= bw_of_request.at(ev.id);
      bw_of_request.erase(ev.id);
      continue;
    }
    const ServiceRequest& req = *by_id.at(ev.id);
    RequestRecord rec;
    rec.id = req.id();
    rec.arrival_time = req.arrival_time();
    rec.holding_time = req.holding_time();
    rec.vnf_count = static_cast<int>(req.vnfs().size());
    for (const auto& v : req.vnfs()) rec.cpu_demand += v.cpu_demand;
    for (const auto& e : req.vlinks()) rec.bw_demand += e.bw_demand;

    SolveResult result;
    if (method.kind == MethodKind::LinkBased) {
      auto model = build_link_based_model(net, req, method.link_variant, cfg.gamma);
      // A restricted path model is solved first; its embedding is a feasible
      // point of the link model and primes the branch-and-bound incumbent.
      PbVariant heuristic_variant =
          method.link_variant == LinkVariant::Sce ? PbVariant::PbSce : PbVariant::PbNodeTrust;
      PbModelOptions opt;
      opt.gamma = cfg.gamma;
      opt.couple_destination = cfg.couple_destination;
      SolveBudget heuristic_budget;
      heuristic_budget.time_limit_s = std::min(2.0, budget.time_limit_s / 4.0);
      SolveResult heuristic;
      for (int hk : {std::max(method.k, 12), 32}) {
        auto universe = build_path_universe(net, req, hk, eligibility_mode(heuristic_variant),
                                            PathTrustPolicy::MinLink);
        auto heuristic_model = build_pb_model(net, req, universe, heuristic_variant, opt);
        heuristic = solve_milp(net, req, heuristic_model, heuristic_budget);
        if (heuristic.solution) break;
      }
      WarmStart warm;
      if (heuristic.solution) {
        warm.solution = &*heuristic.solution;
        warm.objective = heuristic.objective;
      }
      result = solve_milp(net, req, model, budget, {}, warm);
    } else {
      auto universe = build_path_universe(net, req, method.k, eligibility_mode(method.variant),
                                          PathTrustPolicy::MinLink);
      detail::stamp_path_trusts(universe, input.trust_seed, cfg.dist.path_trust);
      PbModelOptions opt;
      opt.gamma = cfg.gamma;
      opt.couple_destination = cfg.couple_destination;
      auto model = build_pb_model(net, req, universe, method.variant, opt);
      result = solve_milp(net, req, model, budget);
    }
    rec.nodes_explored = result.stats.nodes_explored;
    rec.lp_iterations = result.stats.lp_iterations;
    rec.solve_time_s = result.stats.wall_time_s;

    std::size_t w = static_cast<std::size_t>(req.arrival_time() / cfg.window);
    ensure_window(w);
    out.windows[w].arrivals += 1;
    ++out.total_arrivals;

    // Anytime admission: a feasible incumbent is applied even when the
    // optimality proof ran out of budget.
    if (result.solution) {
      const auto& sol = *result.solution;
      auto report = validate_solution(net, req, sol, method.trust_mode());
      if (!report.valid()) {
        throw std::logic_error("solver produced an invalid embedding: " +
                               report.violations.front().family + ": " +
                               report.violations.front().what);
      }
      net = apply_embedding(net, req, sol);
      bw_in_service += rec.bw_demand;
      bw_of_request[req.id()] = rec.bw_demand;
      events.push({req.arrival_time() + req.holding_time(), 0, req.id()});
      rec.accepted = true;
      rec.objective = result.objective;
      rec.bw_revenue = sol.bw_revenue;
      rec.bw_cost = sol.bw_cost;
      rec.cpu_revenue = sol.cpu_revenue;
      rec.cpu_cost = sol.cpu_cost;
      out.windows[w].accepted += 1;
      out.windows[w].bw_revenue += sol.bw_revenue;
      out.windows[w].bw_cost += sol.bw_cost;
      out.windows[w].cpu_revenue += sol.cpu_revenue;
      out.windows[w].cpu_cost += sol.cpu_cost;
      ++out.total_accepted;
      out.accepted_size_histogram[rec.vnf_count] += 1;
    } else if (result.status == SolveStatus::Timeout) {
      rec.reject_reason = "timeout";
      ++out.rejected_timeout;
    } else if (result.status == SolveStatus::Infeasible) {
      rec.reject_reason = "infeasible";
      ++out.rejected_infeasible;
    } else {
      rec.reject_reason = "numerical_failure";
      ++out.rejected_timeout;
    }
    out.requests.push_back(std::move(rec));
  }

  // Close the trailing window.
  if (now > cfg.window * static_cast<double>(cur_window)) {
    ensure_window(cur_window);
    double span = now - cfg.window * static_cast<double>(cur_window);
    out.windows[cur_window].cpu_utilization = window_integral / span;
    out.windows[cur_window].cpu_in_service = window_cpu_svc / span;
    out.windows[cur_window].bw_in_service = window_bw_svc / span;
    out.windows[cur_window].t_end = now;
  }
  for (auto& wm : out.windows) {
    wm.acceptance_ratio = wm.arrivals > 0 ? static_cast<double>(wm.accepted) / wm.arrivals : 0.0;
  }

  // Steady state: the second half of the arrival horizon. The drain phase
  // after the last arrival is excluded, it only empties the system.
  double horizon = input.requests.empty() ? now : input.requests.back().arrival_time();
  double half = horizon / 2.0;
  double util_integral = 0.0, util_span = 0.0;
  double cpu_svc_integral = 0.0, bw_svc_integral = 0.0;
  for (const auto& wm : out.windows) {
    double lo = std::max(wm.t_begin, half);
    double hi = std::min(wm.t_end, horizon);
    if (lo >= hi) continue;
    util_integral += wm.cpu_utilization * (hi - lo);
    cpu_svc_integral += wm.cpu_in_service * (hi - lo);
    bw_svc_integral += wm.bw_in_service * (hi - lo);
    util_span += hi - lo;
  }
  out.steady_utilization = util_span > 0 ? util_integral / util_span : out.initial_utilization;
  out.steady_cpu_in_service = util_span > 0 ? cpu_svc_integral / util_span : 0.0;
  out.steady_bw_in_service = util_span > 0 ? bw_svc_integral / util_span : 0.0;
  double half_arrivals = half;
  for (const auto& rec : out.requests) {
    if (rec.arrival_time < half_arrivals) continue;
    ++out.steady_arrivals;
    if (rec.accepted) {
      ++out.steady_accepted;
      out.steady_bw_revenue += rec.bw_revenue;
      out.steady_bw_cost += rec.bw_cost;
      out.steady_cpu_revenue += rec.cpu_revenue;
      out.steady_cpu_cost += rec.cpu_cost;
    }
  }
  out.steady_acceptance =
      out.steady_arrivals > 0 ? static_cast<double>(out.steady_accepted) / out.steady_arrivals : 0.0;
  return out;
}

inline MetricsSeries run_simulation(const ExperimentConfig& cfg) {
  auto input = make_simulation_input(cfg);
  return run_simulation(cfg, method_from_config(cfg), input);
}

struct ExperimentReport {
  std::vector<std::pair<Method, MetricsSeries>> series;

  const MetricsSeries* find(const std::string& name) const {
    for (const auto& [m, s] : series) {
      if (m.name() == name) return &s;
    }
    return nullptr;
  }
};

namespace detail {

inline ExperimentReport run_methods(const ExperimentConfig& cfg, const std::vector<Method>& methods) {
  auto input = make_simulation_input(cfg);
  ExperimentReport report;
  report.series.resize(methods.size());
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    workers.emplace_back([&, i] { report.series[i] = {methods[i], run_simulation(cfg, methods[i], input)}; });
  }
  for (auto& w : workers) w.join();
  return report;
}

}  // namespace detail

/// k-sweep against the link-based benchmark, trust constraints off, all
/// methods consuming the identical request stream.
inline ExperimentReport run_experiment_A(const ExperimentConfig& cfg) {
  std::vector<Method> methods;
  for (int k : {8, 10, 12}) methods.push_back({MethodKind::Kpb, k, PbVariant::PbSce, LinkVariant::Sce});
  methods.push_back({MethodKind::LinkBased, 0, PbVariant::PbSce, LinkVariant::Sce});
  return detail::run_methods(cfg, methods);
}

/// Trust ablation at fixed k = 12: no trust, node trust, node + path trust.
inline ExperimentReport run_experiment_B(const ExperimentConfig& cfg) {
  std::vector<Method> methods;
  for (auto v : {PbVariant::PbSce, PbVariant::PbNodeTrust, PbVariant::PbTasce}) {
    methods.push_back({MethodKind::Kpb, 12, v, LinkVariant::Sce});
  }
  return detail::run_methods(cfg, methods);
}

/// The default run with the VNF-count distribution collapsed to one size.
inline MetricsSeries size_sensitivity(const ExperimentConfig& cfg, int fixed_vnf_count) {
  if (fixed_vnf_count < 1) throw std::invalid_argument("fixed_vnf_count must be positive");
  ExperimentConfig degenerate = cfg;
  degenerate.dist.vnf_count = {static_cast<double>(fixed_vnf_count),
                               static_cast<double>(fixed_vnf_count)};
  return run_simulation(degenerate);
}

// ---- Result emission -------------------------------------------------------

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace detail

inline void write_windows_csv(std::ostream& os, const ExperimentReport& report) {
  os << "method,window,t_begin,t_end,arrivals,accepted,acceptance_ratio,cpu_utilization,"
        "bw_revenue,bw_cost,cpu_revenue,cpu_cost\n";
  for (const auto& [m, s] : report.series) {
    for (std::size_t w = 0; w < s.windows.size(); ++w) {
      const auto& wm = s.windows[w];
      os << m.name() << ',' << w << ',' << detail::fmt(wm.t_begin) << ',' << detail::fmt(wm.t_end)
         << ',' << wm.arrivals << ',' << wm.accepted << ',' << detail::fmt(wm.acceptance_ratio)
         << ',' << detail::fmt(wm.cpu_utilization) << ',' << detail::fmt(wm.bw_revenue) << ','
         << detail::fmt(wm.bw_cost) << ',' << detail::fmt(wm.cpu_revenue) << ','
         << detail::fmt(wm.cpu_cost) << '\n';
    }
  }
}

inline void write_summary_csv(std::ostream& os, const ExperimentReport& report) {
  os << "method,arrivals,accepted,acceptance,rejected_infeasible,rejected_timeout,"
        "steady_acceptance,steady_utilization,steady_bw_revenue,steady_bw_cost,"
        "steady_cpu_revenue,steady_cpu_cost\n";
  for (const auto& [m, s] : report.series) {
    double acc = s.total_arrivals > 0 ? static_cast<double>(s.total_accepted) / s.total_arrivals : 0.0;
    os << m.name() << ',' << s.total_arrivals << ',' << s.total_accepted << ',' << detail::fmt(acc)
       << ',' << s.rejected_infeasible << ',' << s.rejected_timeout << ','
       << detail::fmt(s.steady_acceptance) << ',' << detail::fmt(s.steady_utilization) << ','
       << detail::fmt(s.steady_bw_revenue) << ',' << detail::fmt(s.steady_bw_cost) << ','
       << detail::fmt(s.steady_cpu_revenue) << ',' << detail::fmt(s.steady_cpu_cost) << '\n';
  }
}

inline void write_size_cdf_csv(std::ostream& os, const ExperimentReport& report) {
  os << "method,vnf_count,accepted,cumulative_fraction\n";
  for (const auto& [m, s] : report.series) {
    int total = 0;
    for (const auto& [size, count] : s.accepted_size_histogram) total += count;
    int running = 0;
    for (const auto& [size, count] : s.accepted_size_histogram) {
      running += count;
      os << m.name() << ',' << size << ',' << count << ','
         << detail::fmt(total > 0 ? static_cast<double>(running) / total : 0.0) << '\n';
    }
  }
}

inline void write_requests_jsonl(std::ostream& os, const Method& method, const MetricsSeries& s) {
  for (const auto& r : s.requests) {
    os << "{\"method\":\"" << method.name() << "\",\"id\":" << r.id
       << ",\"arrival_time\":" << detail::fmt(r.arrival_time)
       << ",\"vnf_count\":" << r.vnf_count << ",\"cpu_demand\":" << detail::fmt(r.cpu_demand)
       << ",\"bw_demand\":" << detail::fmt(r.bw_demand)
       << ",\"accepted\":" << (r.accepted ? "true" : "false") << ",\"reject_reason\":\""
       << r.reject_reason << "\",\"objective\":" << detail::fmt(r.objective)
       << ",\"bw_revenue\":" << detail::fmt(r.bw_revenue) << ",\"bw_cost\":" << detail::fmt(r.bw_cost)
       << ",\"cpu_revenue\":" << detail::fmt(r.cpu_revenue)
       << ",\"cpu_cost\":" << detail::fmt(r.cpu_cost) << ",\"nodes\":" << r.nodes_explored
       << ",\"lp_iterations\":" << r.lp_iterations << "}\n";
  }
}

}  // namespace sfce
