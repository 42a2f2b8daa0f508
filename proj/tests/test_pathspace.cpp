#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <sfce/pathspace.hpp>

using namespace sfce;

namespace {

SubstrateNetwork grid_net() {
  // 3 servers, 3 switches, enough cycles for several alternatives per pair.
  std::vector<SubstrateNode> nodes{
      {0, "s0", NodeKind::Server, 16, 16, TrustValue(0.9)},
      {1, "s1", NodeKind::Server, 16, 16, TrustValue(0.6)},
      {2, "s2", NodeKind::Server, 16, 16, TrustValue(0.3)},
      {3, "w3", NodeKind::Switch, 0, 0, TrustValue(0.8)},
      {4, "w4", NodeKind::Switch, 0, 0, TrustValue(0.8)},
      {5, "w5", NodeKind::Switch, 0, 0, TrustValue(0.8)},
  };
  std::vector<SubstrateLink> links{
      {0, 3, 100, 100, TrustValue(0.9)}, {0, 4, 100, 100, TrustValue(0.5)},
      {1, 3, 100, 100, TrustValue(0.8)}, {1, 5, 100, 100, TrustValue(0.7)},
      {2, 4, 100, 100, TrustValue(0.6)}, {2, 5, 100, 100, TrustValue(0.4)},
      {3, 4, 100, 100, TrustValue(0.9)}, {4, 5, 100, 100, TrustValue(0.9)},
  };
  return SubstrateNetwork(std::move(nodes), std::move(links));
}

ServiceRequest chain_request(TrustValue node_req, double cpu = 2.0) {
  std::vector<Vnf> vnfs{{0, "fw", cpu, node_req}, {1, "ids", cpu, node_req}};
  std::vector<VirtualLink> vlinks{{0, 1, 10.0, TrustValue(0.0)}};
  return ServiceRequest(1, std::move(vnfs), std::move(vlinks));
}

// Exhaustive reference: every colocation plus every simple substrate path
// between eligible host pairs, sorted by (cost, node sequence).
std::vector<AugmentedPath> enumerate_all(const SubstrateNetwork& net, const AugmentedGraph& g,
                                         const std::map<std::size_t, double>* weights = nullptr) {
  std::vector<AugmentedPath> out;
  std::set<int> sinks(g.sink_hosts.begin(), g.sink_hosts.end());
  auto weight = [&](std::size_t li) { return weights ? weights->at(li) : 1.0; };
  auto emit = [&](const std::vector<int>& seq, double cost) {
    AugmentedPath p;
    p.vsrc = g.vsrc;
    p.vdst = g.vdst;
    p.node_seq = seq;
    p.host_src = seq.front();
    p.host_dst = seq.back();
    p.cost = cost;
    out.push_back(std::move(p));
  };
  for (int s : g.source_hosts) {
    std::vector<int> seq{s};
    std::set<int> used{s};
    std::function<void(int, double)> dfs = [&](int u, double cost) {
      if (sinks.count(u)) emit(seq, cost);
      for (std::size_t li : net.links_at(u)) {
        const auto& l = net.links()[li];
        int v = l.a == u ? l.b : l.a;
        if (used.count(v)) continue;
        used.insert(v);
        seq.push_back(v);
        dfs(v, cost + weight(li));
        seq.pop_back();
        used.erase(v);
      }
    };
    dfs(s, 0.0);
  }
  std::stable_sort(out.begin(), out.end(), [](const AugmentedPath& a, const AugmentedPath& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.node_seq < b.node_seq;
  });
  return out;
}

}  // namespace

TEST_CASE("augmented graph carries eligibility on both cpu and trust") {
  auto net = grid_net();
  auto req = chain_request(TrustValue(0.5));
  auto g_on = build_augmented_graph(net, req, req.vlinks()[0], EligibilityMode::TrustOn);
  CHECK(g_on.source_hosts == std::vector<int>{0, 1});
  auto g_off = build_augmented_graph(net, req, req.vlinks()[0], EligibilityMode::TrustOff);
  CHECK(g_off.source_hosts == std::vector<int>{0, 1, 2});

  auto big = chain_request(TrustValue(0.0), 20.0);
  auto g_cpu = build_augmented_graph(net, big, big.vlinks()[0], EligibilityMode::TrustOff);
  CHECK(g_cpu.source_hosts.empty());

  std::vector<Vnf> vnfs{{0, "fw", 1, TrustValue(0)}, {1, "ids", 1, TrustValue(0)}};
  ServiceRequest other(2, vnfs, {{0, 1, 1, TrustValue(0)}});
  CHECK_THROWS_AS(build_augmented_graph(net, other, VirtualLink{1, 0, 1, TrustValue(0)},
                                        EligibilityMode::TrustOff),
                  std::invalid_argument);
}

TEST_CASE("enumeration matches the exhaustive reference for every k") {
  auto net = grid_net();
  for (auto mode : {EligibilityMode::TrustOff, EligibilityMode::TrustOn}) {
    auto req = chain_request(TrustValue(0.5));
    auto g = build_augmented_graph(net, req, req.vlinks()[0], mode);
    auto all = enumerate_all(net, g);
    auto got_all = k_shortest_augmented_paths(g, kUnlimitedPaths);
    REQUIRE(got_all.size() == all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(got_all[i].node_seq == all[i].node_seq);
      CHECK(got_all[i].cost == doctest::Approx(all[i].cost));
    }
    for (int k : {1, 2, 3, 5, 8, 13}) {
      auto got = k_shortest_augmented_paths(g, k);
      REQUIRE(got.size() == std::min<std::size_t>(k, all.size()));
      for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].node_seq == all[i].node_seq);
    }
  }
}

TEST_CASE("colocation paths come first at zero cost with full trust") {
  auto net = grid_net();
  auto req = chain_request(TrustValue(0.0));
  auto g = build_augmented_graph(net, req, req.vlinks()[0], EligibilityMode::TrustOff);
  auto got = k_shortest_augmented_paths(g, 5);
  REQUIRE(got.size() == 5);
  for (int i = 0; i < 3; ++i) {
    CHECK(got[i].is_colocation());
    CHECK(got[i].node_seq == std::vector<int>{i});
    CHECK(got[i].cost == 0.0);
    CHECK(path_trust(net, got[i], PathTrustPolicy::MinLink).value() == 1.0);
  }
  CHECK_FALSE(got[3].is_colocation());
  CHECK(got[3].hop_count() >= 2);
}

TEST_CASE("custom positive link weights steer the ordering") {
  auto net = grid_net();
  auto req = chain_request(TrustValue(0.5));
  auto g = build_augmented_graph(net, req, req.vlinks()[0], EligibilityMode::TrustOn);
  std::map<std::size_t, double> w;
  std::mt19937 rng(42);
  for (std::size_t li = 0; li < net.links().size(); ++li) {
    w[li] = 0.25 + (rng() % 100) / 25.0;
  }
  auto all = enumerate_all(net, g, &w);
  auto got = k_shortest_augmented_paths(g, kUnlimitedPaths, &w);
  REQUIRE(got.size() == all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(got[i].node_seq == all[i].node_seq);
    CHECK(got[i].cost == doctest::Approx(all[i].cost));
  }

  std::map<std::size_t, double> missing{{0, 1.0}};
  CHECK_THROWS_AS(k_shortest_augmented_paths(g, 3, &missing), std::invalid_argument);
  auto zero = w;
  zero[2] = 0.0;
  CHECK_THROWS_AS(k_shortest_augmented_paths(g, kUnlimitedPaths, &zero), std::invalid_argument);
  CHECK_THROWS_AS(k_shortest_augmented_paths(g, 0), std::invalid_argument);
}

TEST_CASE("path trust policies") {
  auto net = grid_net();
  AugmentedPath p;
  p.node_seq = {0, 3, 1};  // trusts 0.9, 0.8
  p.host_src = 0;
  p.host_dst = 1;
  CHECK(path_trust(net, p, PathTrustPolicy::MinLink).value() == doctest::Approx(0.8));
  CHECK(path_trust(net, p, PathTrustPolicy::ProductLink).value() == doctest::Approx(0.72));

  PathTrustTable table{{path_trust_key(p), TrustValue(0.55)}};
  CHECK(path_trust(net, p, PathTrustPolicy::Assigned, &table).value() == doctest::Approx(0.55));

  AugmentedPath rev = p;
  rev.node_seq = {1, 3, 0};
  rev.host_src = 1;
  rev.host_dst = 0;
  CHECK(path_trust_key(rev) == path_trust_key(p));

  AugmentedPath unknown = p;
  unknown.node_seq = {0, 4, 2};
  CHECK_THROWS_AS(path_trust(net, unknown, PathTrustPolicy::Assigned, &table), std::invalid_argument);
  CHECK_THROWS_AS(path_trust(net, p, PathTrustPolicy::Assigned, nullptr), std::invalid_argument);

  AugmentedPath colo;
  colo.node_seq = {2};
  colo.host_src = colo.host_dst = 2;
  CHECK(path_trust(net, colo, PathTrustPolicy::Assigned, &table).value() == 1.0);
}

TEST_CASE("universes are nested in k and carry evaluated trust") {
  auto net = grid_net();
  std::vector<Vnf> vnfs{{0, "fw", 2, TrustValue(0.5)}, {1, "ids", 2, TrustValue(0.5)},
                        {2, "lb", 2, TrustValue(0.2)}};
  std::vector<VirtualLink> vlinks{{0, 1, 10, TrustValue(0.6)}, {1, 2, 20, TrustValue(0.3)}};
  ServiceRequest req(1, std::move(vnfs), std::move(vlinks));

  auto u3 = build_path_universe(net, req, 3, EligibilityMode::TrustOn, PathTrustPolicy::MinLink);
  auto u6 = build_path_universe(net, req, 6, EligibilityMode::TrustOn, PathTrustPolicy::MinLink);
  for (const auto& [key, small] : u3.by_commodity()) {
    const auto& big = u6.paths_for(key.first, key.second);
    REQUIRE(big.size() >= small.size());
    for (std::size_t i = 0; i < small.size(); ++i) {
      CHECK(small[i].node_seq == big[i].node_seq);
      CHECK(small[i].trust.value() == big[i].trust.value());
    }
  }

  // Global ids are unique across commodities.
  std::set<long> ids;
  for (const auto& [key, paths] : u6.by_commodity()) {
    (void)key;
    for (const auto& p : paths) CHECK(ids.insert(p.id).second);
  }
  CHECK(ids.size() == u6.total_paths());
}
