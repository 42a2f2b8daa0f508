#pragma once

// JSON (de)serialization for substrates, requests, solutions, trust tables,
// and experiment configs. Field layout is documented by the files under
// schemas/; unknown fields are rejected nowhere, missing optional config
// fields fall back to their defaults.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sfce/net_model.hpp"
#include "sfce/pathspace.hpp"
#include "sfce/workload.hpp"

namespace sfce {

using json = nlohmann::json;

inline json to_json(const SubstrateNetwork& net) {
  json nodes = json::array();
  for (const auto& n : net.nodes()) {
    nodes.push_back({{"id", n.id},
                     {"name", n.name},
                     {"kind", n.kind == NodeKind::Server ? "server" : "switch"},
                     {"total_cpu", n.total_cpu},
                     {"residual_cpu", net.residual_cpu(n.id)},
                     {"trust", n.trust.value()}});
  }
  json links = json::array();
  for (std::size_t li = 0; li < net.links().size(); ++li) {
    const auto& l = net.links()[li];
    links.push_back({{"a", l.a},
                     {"b", l.b},
                     {"capacity", l.capacity},
                     {"residual_bw", net.residual_bw(li)},
                     {"trust", l.trust.value()}});
  }
  return {{"nodes", nodes}, {"links", links}};
}

inline SubstrateNetwork substrate_from_json(const json& j) {
  std::vector<SubstrateNode> nodes;
  for (const auto& n : j.at("nodes")) {
    std::string kind = n.at("kind").get<std::string>();
    if (kind != "server" && kind != "switch") {
      throw std::invalid_argument("nodes[].kind must be 'server' or 'switch', got '" + kind + "'");
    }
    nodes.push_back({n.at("id").get<int>(), n.value("name", std::string{}),
                     kind == "server" ? NodeKind::Server : NodeKind::Switch,
                     n.at("total_cpu").get<double>(), n.at("residual_cpu").get<double>(),
                     TrustValue(n.value("trust", 1.0))});
  }
  std::vector<SubstrateLink> links;
  for (const auto& l : j.at("links")) {
    links.push_back({l.at("a").get<int>(), l.at("b").get<int>(), l.at("capacity").get<double>(),
                     l.at("residual_bw").get<double>(), TrustValue(l.value("trust", 1.0))});
  }
  return SubstrateNetwork(std::move(nodes), std::move(links));
}

inline json to_json(const ServiceRequest& req) {
  json vnfs = json::array();
  for (const auto& v : req.vnfs()) {
    vnfs.push_back({{"id", v.id},
                    {"function_type", v.function_type},
                    {"cpu_demand", v.cpu_demand},
                    {"trust_req", v.trust_req.value()}});
  }
  json vlinks = json::array();
  for (const auto& e : req.vlinks()) {
    vlinks.push_back({{"src", e.src},
                      {"dst", e.dst},
                      {"bw_demand", e.bw_demand},
                      {"trust_req", e.trust_req.value()}});
  }
  return {{"id", req.id()},
          {"arrival_time", req.arrival_time()},
          {"holding_time", req.holding_time()},
          {"vnfs", vnfs},
          {"vlinks", vlinks}};
}

inline ServiceRequest request_from_json(const json& j) {
  std::vector<Vnf> vnfs;
  for (const auto& v : j.at("vnfs")) {
    vnfs.push_back({v.at("id").get<int>(), v.value("function_type", std::string{}),
                    v.at("cpu_demand").get<double>(), TrustValue(v.value("trust_req", 0.0))});
  }
  std::vector<VirtualLink> vlinks;
  for (const auto& e : j.at("vlinks")) {
    vlinks.push_back({e.at("src").get<int>(), e.at("dst").get<int>(), e.at("bw_demand").get<double>(),
                      TrustValue(e.value("trust_req", 0.0))});
  }
  return ServiceRequest(j.value("id", 0), std::move(vnfs), std::move(vlinks),
                        j.value("arrival_time", 0.0), j.value("holding_time", 1.0));
}

inline json to_json(const AugmentedPath& p) {
  return {{"id", p.id},     {"vsrc", p.vsrc},         {"vdst", p.vdst},
          {"cost", p.cost}, {"node_seq", p.node_seq}, {"trust", p.trust.value()}};
}

inline AugmentedPath path_from_json(const json& j) {
  AugmentedPath p;
  p.id = j.value("id", -1L);
  p.vsrc = j.at("vsrc").get<int>();
  p.vdst = j.at("vdst").get<int>();
  p.node_seq = j.at("node_seq").get<std::vector<int>>();
  if (p.node_seq.empty()) throw std::invalid_argument("path node_seq must be nonempty");
  p.host_src = p.node_seq.front();
  p.host_dst = p.node_seq.back();
  p.cost = j.value("cost", static_cast<double>(p.node_seq.size() - 1));
  p.trust = TrustValue(j.value("trust", 1.0));
  return p;
}

inline json to_json(const EmbeddingSolution& sol) {
  json assignment = json::object();
  for (const auto& [i, u] : sol.assignment) assignment[std::to_string(i)] = u;
  json flows = json::array();
  for (const auto& fa : sol.flows) flows.push_back({{"path", to_json(fa.path)}, {"amount", fa.amount}});
  return {{"assignment", assignment}, {"flows", flows},
          {"objective_value", sol.objective_value}, {"bw_cost", sol.bw_cost},
          {"bw_revenue", sol.bw_revenue},           {"cpu_cost", sol.cpu_cost},
          {"cpu_revenue", sol.cpu_revenue}};
}

inline EmbeddingSolution solution_from_json(const json& j) {
  EmbeddingSolution sol;
  for (const auto& [key, val] : j.at("assignment").items()) {
    sol.assignment[std::stoi(key)] = val.get<int>();
  }
  for (const auto& f : j.at("flows")) {
    sol.flows.push_back({path_from_json(f.at("path")), f.at("amount").get<double>()});
  }
  sol.objective_value = j.value("objective_value", 0.0);
  sol.bw_cost = j.value("bw_cost", 0.0);
  sol.bw_revenue = j.value("bw_revenue", 0.0);
  sol.cpu_cost = j.value("cpu_cost", 0.0);
  sol.cpu_revenue = j.value("cpu_revenue", 0.0);
  return sol;
}

inline json to_json(const PathTrustTable& table) {
  json out = json::object();
  for (const auto& [key, trust] : table) out[key] = trust.value();
  return out;
}

inline PathTrustTable trust_table_from_json(const json& j) {
  PathTrustTable table;
  for (const auto& [key, val] : j.items()) table.emplace(key, TrustValue(val.get<double>()));
  return table;
}

inline json to_json(const Bounds& b) { return {{"low", b.low}, {"high", b.high}}; }

inline Bounds bounds_from_json(const json& j, Bounds fallback) {
  if (j.is_null()) return fallback;
  if (j.is_array()) return {j.at(0).get<double>(), j.at(1).get<double>()};
  return {j.value("low", fallback.low), j.value("high", fallback.high)};
}

inline json to_json(const ExperimentConfig& cfg) {
  return {{"seed", cfg.seed},
          {"pods", cfg.pods},
          {"servers_per_tor", cfg.servers_per_tor},
          {"cores_per_server", cfg.cores_per_server},
          {"core_ghz", cfg.core_ghz},
          {"inter_rack_gbps", cfg.inter_rack_gbps},
          {"tor_server_gbps", cfg.tor_server_gbps},
          {"distributions",
           {{"initial_util", to_json(cfg.dist.initial_util)},
            {"server_trust", to_json(cfg.dist.server_trust)},
            {"path_trust", to_json(cfg.dist.path_trust)},
            {"vnf_count", to_json(cfg.dist.vnf_count)},
            {"inbound_mbps", to_json(cfg.dist.inbound_mbps)},
            {"node_trust_req", to_json(cfg.dist.node_trust_req)},
            {"link_trust_req", to_json(cfg.dist.link_trust_req)}}},
          {"templates", cfg.templates},
          {"profile", cfg.profile},
          {"k", cfg.k},
          {"variant", cfg.variant},
          {"gamma", cfg.gamma},
          {"couple_destination", cfg.couple_destination},
          {"solver_time_limit_s", cfg.solver_time_limit_s},
          {"mean_interarrival", cfg.mean_interarrival},
          {"mean_holding", cfg.mean_holding},
          {"request_count", cfg.request_count},
          {"window", cfg.window}};
}

/// Reads a config, filling unspecified fields from the defaults; validates
/// before returning.
inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.seed = j.value("seed", cfg.seed);
  cfg.pods = j.value("pods", cfg.pods);
  cfg.servers_per_tor = j.value("servers_per_tor", cfg.servers_per_tor);
  cfg.cores_per_server = j.value("cores_per_server", cfg.cores_per_server);
  cfg.core_ghz = j.value("core_ghz", cfg.core_ghz);
  cfg.inter_rack_gbps = j.value("inter_rack_gbps", cfg.inter_rack_gbps);
  cfg.tor_server_gbps = j.value("tor_server_gbps", cfg.tor_server_gbps);
  if (j.contains("distributions")) {
    const auto& d = j.at("distributions");
    auto get = [&](const char* name, Bounds fb) {
      return d.contains(name) ? bounds_from_json(d.at(name), fb) : fb;
    };
    cfg.dist.initial_util = get("initial_util", cfg.dist.initial_util);
    cfg.dist.server_trust = get("server_trust", cfg.dist.server_trust);
    cfg.dist.path_trust = get("path_trust", cfg.dist.path_trust);
    cfg.dist.vnf_count = get("vnf_count", cfg.dist.vnf_count);
    cfg.dist.inbound_mbps = get("inbound_mbps", cfg.dist.inbound_mbps);
    cfg.dist.node_trust_req = get("node_trust_req", cfg.dist.node_trust_req);
    cfg.dist.link_trust_req = get("link_trust_req", cfg.dist.link_trust_req);
  }
  if (j.contains("templates")) cfg.templates = j.at("templates").get<std::vector<std::vector<std::string>>>();
  if (j.contains("profile")) cfg.profile = j.at("profile").get<std::map<std::string, double>>();
  cfg.k = j.value("k", cfg.k);
  cfg.variant = j.value("variant", cfg.variant);
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.couple_destination = j.value("couple_destination", cfg.couple_destination);
  cfg.solver_time_limit_s = j.value("solver_time_limit_s", cfg.solver_time_limit_s);
  cfg.mean_interarrival = j.value("mean_interarrival", cfg.mean_interarrival);
  cfg.mean_holding = j.value("mean_holding", cfg.mean_holding);
  cfg.request_count = j.value("request_count", cfg.request_count);
  cfg.window = j.value("window", cfg.window);
  cfg.validate();
  return cfg;
}

/// File helpers: parse errors and schema violations surface as
/// invalid_argument naming the file.
inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

template <typename T, typename Fn>
T load_with_context(const std::string& path, Fn&& parse) {
  try {
    return parse(load_json_file(path));
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

inline SubstrateNetwork load_substrate(const std::string& path) {
  return load_with_context<SubstrateNetwork>(path, [](const json& j) { return substrate_from_json(j); });
}

inline ServiceRequest load_request(const std::string& path) {
  return load_with_context<ServiceRequest>(path, [](const json& j) { return request_from_json(j); });
}

inline ExperimentConfig load_config(const std::string& path) {
  return load_with_context<ExperimentConfig>(path, [](const json& j) { return config_from_json(j); });
}

inline void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace sfce
