#pragma once

// Experiment input generation: seeded random streams, the fat-tree
// evaluation zone, templated service chains, and path trust assignment.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sfce/net_model.hpp"
#include "sfce/pathspace.hpp"

namespace sfce {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_string(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) h = splitmix64(h ^ c);
  return h;
}

inline double unit_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0,1)
}

}  // namespace detail

/// Seeded random source with a portable value derivation (the raw mt19937_64
/// output stream is pinned by the standard; the real-valued transforms here
/// avoid the implementation-defined distribution classes). One independent
/// stream per purpose keeps draws stable when unrelated knobs change.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view purpose)
      : base_(detail::hash_string(detail::splitmix64(seed), purpose)), eng_(base_) {}

  std::uint64_t base_seed() const { return base_; }

  double unit() { return detail::unit_from_bits(eng_()); }

  double uniform(double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("uniform bounds out of order");
    return lo + (hi - lo) * unit();
  }

  long uniform_int(long lo, long hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int bounds out of order");
    long span = hi - lo + 1;
    long v = lo + static_cast<long>(unit() * static_cast<double>(span));
    return v > hi ? hi : v;
  }

  double exponential(double mean) {
    if (!(mean > 0)) throw std::invalid_argument("exponential mean must be positive");
    return -mean * std::log(1.0 - unit());
  }

 private:
  std::uint64_t base_;
  std::mt19937_64 eng_;
};

struct Bounds {
  double low{0.0};
  double high{1.0};
};

/// All knobs of one evaluation run. Values are the documented defaults; a
/// JSON config can override any subset.
struct ExperimentConfig {
  std::uint64_t seed{1};

  // Substrate zone.
  int pods{4};
  int servers_per_tor{2};
  int cores_per_server{8};
  double core_ghz{2.0};
  double inter_rack_gbps{16.0};
  double tor_server_gbps{8.0};

  struct Distributions {
    Bounds initial_util{0.3, 0.6};
    Bounds server_trust{0.2, 1.0};
    Bounds path_trust{0.5, 1.0};
    Bounds vnf_count{5, 9};
    Bounds inbound_mbps{50, 100};
    Bounds node_trust_req{0.2, 0.8};
    Bounds link_trust_req{0.2, 0.8};
  } dist;

  std::vector<std::vector<std::string>> templates{
      {"fw", "ids", "lb"}, {"nat", "fw", "dpi"}, {"fw", "vpn", "vopt"}};

  // GHz*cores per Mbps of inbound rate, per function type. At 50-100 Mbps a
  // 5-9 VNF chain needs roughly one server's worth of CPU, so chains split
  // across hosts under load.
  std::map<std::string, double> profile{{"fw", 0.02}, {"ids", 0.04}, {"dpi", 0.05},
                                        {"nat", 0.01}, {"lb", 0.01}, {"vpn", 0.03},
                                        {"vopt", 0.04}};

  // Embedding method knobs.
  int k{12};
  std::string variant{"pb_tasce"};  // pb_sce | pb_node_trust | pb_tasce | link_based | link_node_trust
  double gamma{1.0};
  bool couple_destination{true};
  double solver_time_limit_s{10.0};

  // Arrival process and run length.
  double mean_interarrival{1.0};
  double mean_holding{20.0};
  int request_count{500};
  double window{25.0};

  void validate() const {
    auto chk = [](const Bounds& b, bool unit_range, const char* name) {
      if (b.low > b.high) throw std::invalid_argument(std::string(name) + ": low > high");
      if (unit_range && (b.low < 0 || b.high > 1)) {
        throw std::invalid_argument(std::string(name) + ": bounds outside [0,1]");
      }
    };
    chk(dist.initial_util, true, "initial_util");
    chk(dist.server_trust, true, "server_trust");
    chk(dist.path_trust, true, "path_trust");
    chk(dist.vnf_count, false, "vnf_count");
    chk(dist.inbound_mbps, false, "inbound_mbps");
    chk(dist.node_trust_req, true, "node_trust_req");
    chk(dist.link_trust_req, true, "link_trust_req");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (pods < 1 || servers_per_tor < 1) throw std::invalid_argument("zone dimensions must be positive");
    if (gamma < 0) throw std::invalid_argument("gamma must be nonnegative");
    if (mean_interarrival <= 0 || mean_holding <= 0) {
      throw std::invalid_argument("arrival parameters must be positive");
    }
    if (request_count < 0) throw std::invalid_argument("request_count must be nonnegative");
    if (window <= 0) throw std::invalid_argument("window must be positive");
    if (templates.empty()) throw std::invalid_argument("at least one template required");
    for (const auto& tpl : templates) {
      if (tpl.empty()) throw std::invalid_argument("empty template");
      for (const auto& fn : tpl) {
        if (!profile.count(fn)) throw std::invalid_argument("template function '" + fn + "' has no profile entry");
      }
    }
  }
};

/// One zone of the evaluation fat tree: per pod, two ToR switches with
/// `servers_per_tor` servers each and two aggregation switches in a full
/// bipartite layer; the pods' aggregation switches interconnect through two
/// zone-core switches. Server residuals carry the initial background load.
inline SubstrateNetwork generate_fat_tree_zone(const ExperimentConfig& cfg) {
  cfg.validate();
  RandomStream rng(cfg.seed, "topology");

  const int spt = cfg.servers_per_tor;
  const int servers_per_pod = 2 * spt;
  const int n_servers = cfg.pods * servers_per_pod;
  const int sw_base = n_servers;
  const double server_cpu = cfg.cores_per_server * cfg.core_ghz;
  const double tor_bw = cfg.tor_server_gbps * 1000.0;
  const double rack_bw = cfg.inter_rack_gbps * 1000.0;

  std::vector<SubstrateNode> nodes;
  std::vector<SubstrateLink> links;
  for (int p = 0; p < cfg.pods; ++p) {
    for (int s = 0; s < servers_per_pod; ++s) {
      int id = p * servers_per_pod + s;
      double util = rng.uniform(cfg.dist.initial_util.low, cfg.dist.initial_util.high);
      TrustValue trust(rng.uniform(cfg.dist.server_trust.low, cfg.dist.server_trust.high));
      nodes.push_back({id, "p" + std::to_string(p) + "-srv" + std::to_string(s), NodeKind::Server,
                       server_cpu, server_cpu * (1.0 - util), trust});
    }
  }
  auto tor_id = [&](int p, int t) { return sw_base + p * 4 + t; };
  auto agg_id = [&](int p, int a) { return sw_base + p * 4 + 2 + a; };
  int core_base = sw_base + cfg.pods * 4;
  for (int p = 0; p < cfg.pods; ++p) {
    for (int t = 0; t < 2; ++t) {
      nodes.push_back({tor_id(p, t), "p" + std::to_string(p) + "-tor" + std::to_string(t),
                       NodeKind::Switch, 0, 0, TrustValue(1.0)});
    }
    for (int a = 0; a < 2; ++a) {
      nodes.push_back({agg_id(p, a), "p" + std::to_string(p) + "-agg" + std::to_string(a),
                       NodeKind::Switch, 0, 0, TrustValue(1.0)});
    }
  }
  for (int c = 0; c < 2; ++c) {
    nodes.push_back({core_base + c, "core" + std::to_string(c), NodeKind::Switch, 0, 0, TrustValue(1.0)});
  }

  for (int p = 0; p < cfg.pods; ++p) {
    for (int s = 0; s < servers_per_pod; ++s) {
      links.push_back({p * servers_per_pod + s, tor_id(p, s / spt), tor_bw, tor_bw, TrustValue(1.0)});
    }
    for (int t = 0; t < 2; ++t) {
      for (int a = 0; a < 2; ++a) {
        links.push_back({tor_id(p, t), agg_id(p, a), rack_bw, rack_bw, TrustValue(1.0)});
      }
    }
    for (int a = 0; a < 2; ++a) {
      for (int c = 0; c < 2; ++c) {
        links.push_back({agg_id(p, a), core_base + c, rack_bw, rack_bw, TrustValue(1.0)});
      }
    }
  }
  return SubstrateNetwork(std::move(nodes), std::move(links));
}

/// One service chain drawn from the configured templates: the chain's
/// function types cycle through the chosen template up to the drawn length,
/// CPU demands scale the inbound rate by the function's profile coefficient,
/// and every virtual link carries the full inbound rate.
inline ServiceRequest generate_request(const ExperimentConfig& cfg, RandomStream& rng, int id = 0,
                                       double arrival_time = 0.0, double holding_time = 1.0) {
  int n = static_cast<int>(rng.uniform_int(static_cast<long>(cfg.dist.vnf_count.low),
                                           static_cast<long>(cfg.dist.vnf_count.high)));
  double rate = rng.uniform(cfg.dist.inbound_mbps.low, cfg.dist.inbound_mbps.high);
  const auto& tpl = cfg.templates[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<long>(cfg.templates.size()) - 1))];

  std::vector<Vnf> vnfs;
  for (int i = 0; i < n; ++i) {
    const std::string& fn = tpl[static_cast<std::size_t>(i) % tpl.size()];
    double coeff = cfg.profile.at(fn);
    TrustValue req(rng.uniform(cfg.dist.node_trust_req.low, cfg.dist.node_trust_req.high));
    vnfs.push_back({i, fn, rate * coeff, req});
  }
  std::vector<VirtualLink> vlinks;
  for (int i = 0; i + 1 < n; ++i) {
    TrustValue req(rng.uniform(cfg.dist.link_trust_req.low, cfg.dist.link_trust_req.high));
    vlinks.push_back({i, i + 1, rate, req});
  }
  return ServiceRequest(id, std::move(vnfs), std::move(vlinks), arrival_time, holding_time);
}

/// Deterministic per-path trust draw: the value is a keyed hash of
/// (seed, canonical path key), so a substrate path receives the same trust in
/// every universe it appears in, independent of enumeration order, k, or the
/// embedding variant. Colocation paths stay out of the table (trust 1).
inline double hashed_unit(std::uint64_t seed, std::string_view key) {
  return detail::unit_from_bits(detail::splitmix64(detail::hash_string(detail::splitmix64(seed), key)));
}

inline PathTrustTable assign_path_trusts(const PathUniverse& universe, std::uint64_t seed,
                                         Bounds bounds = {0.5, 1.0}) {
  if (bounds.low < 0 || bounds.high > 1 || bounds.low > bounds.high) {
    throw std::invalid_argument("path trust bounds must be an interval inside [0,1]");
  }
  PathTrustTable table;
  for (const auto& [key, paths] : universe.by_commodity()) {
    (void)key;
    for (const auto& p : paths) {
      if (p.is_colocation()) continue;
      std::string pk = path_trust_key(p);
      if (table.count(pk)) continue;
      table.emplace(pk, TrustValue(bounds.low + (bounds.high - bounds.low) * hashed_unit(seed, pk)));
    }
  }
  return table;
}

/// Stamps the table's trust values onto the universe's paths in place.
inline void apply_path_trusts(PathUniverse& universe, const PathTrustTable& table) {
  for (auto& [key, paths] : universe.mutable_by_commodity()) {
    (void)key;
    for (auto& p : paths) {
      p.trust = p.is_colocation() ? TrustValue(1.0) : table.at(path_trust_key(p));
    }
  }
}

}  // namespace sfce
