#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sfce/solver.hpp>

using namespace sfce;

namespace {

SubstrateNetwork random_net(std::mt19937& rng) {
  int servers = 3 + static_cast<int>(rng() % 2);
  int switches = 2;
  std::vector<SubstrateNode> nodes;
  for (int i = 0; i < servers; ++i) {
    double cpu = 6.0 + static_cast<double>(rng() % 6);
    nodes.push_back({i, "s" + std::to_string(i), NodeKind::Server, cpu, cpu,
                     TrustValue(0.2 + 0.08 * static_cast<double>(rng() % 11))});
  }
  for (int i = 0; i < switches; ++i) {
    nodes.push_back({servers + i, "w" + std::to_string(i), NodeKind::Switch, 0, 0, TrustValue(0.5)});
  }
  std::vector<SubstrateLink> links;
  // Servers hang off alternating switches; switches are joined. Extra random
  // server-switch links add alternative routes.
  for (int i = 0; i < servers; ++i) {
    double cap = 40.0 + static_cast<double>(rng() % 60);
    links.push_back({i, servers + (i % 2), cap, cap, TrustValue(0.3 + 0.07 * static_cast<double>(rng() % 11))});
  }
  links.push_back({servers, servers + 1, 120, 120, TrustValue(0.9)});
  for (int i = 0; i < servers; ++i) {
    if (rng() % 2 == 0) {
      double cap = 40.0 + static_cast<double>(rng() % 60);
      links.push_back(
          {i, servers + ((i + 1) % 2), cap, cap, TrustValue(0.3 + 0.07 * static_cast<double>(rng() % 11))});
    }
  }
  return SubstrateNetwork(std::move(nodes), std::move(links));
}

ServiceRequest random_request(std::mt19937& rng, int id) {
  int n = 2 + static_cast<int>(rng() % 2);
  std::vector<Vnf> vnfs;
  for (int i = 0; i < n; ++i) {
    vnfs.push_back({i, "vnf" + std::to_string(i), 1.0 + static_cast<double>(rng() % 4),
                    TrustValue(0.09 * static_cast<double>(rng() % 11))});
  }
  std::vector<VirtualLink> vlinks;
  for (int i = 0; i + 1 < n; ++i) {
    vlinks.push_back({i, i + 1, 5.0 + static_cast<double>(rng() % 30),
                      TrustValue(0.05 * static_cast<double>(rng() % 9))});
  }
  return ServiceRequest(id, std::move(vnfs), std::move(vlinks));
}

}  // namespace

TEST_CASE("exact path model matches the exhaustive oracle on random instances") {
  std::mt19937 rng(99);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto net = random_net(rng);
    auto req = random_request(rng, trial);
    for (auto variant : {PbVariant::PbSce, PbVariant::PbNodeTrust, PbVariant::PbTasce}) {
      auto universe = build_path_universe(net, req, kUnlimitedPaths, eligibility_mode(variant),
                                          PathTrustPolicy::MinLink);
      auto model = build_pb_model(net, req, universe, variant);
      auto got = solve_milp(net, req, model);
      auto want = brute_force_oracle(net, req, variant, PathTrustPolicy::MinLink);
      if (want.status == SolveStatus::Optimal) {
        ++feasible;
        REQUIRE_MESSAGE(got.status == SolveStatus::Optimal, "trial ", trial);
        CHECK_MESSAGE(got.objective == doctest::Approx(want.objective).epsilon(1e-6), "trial ", trial);
        auto rep = validate_solution(net, req, *got.solution, trust_mode_of(variant));
        CHECK_MESSAGE(rep.valid(), "trial ", trial, " ",
                      rep.valid() ? "" : rep.violations.front().what);
      } else {
        ++infeasible;
        CHECK_MESSAGE(got.status == SolveStatus::Infeasible, "trial ", trial);
      }
    }
  }
  CHECK(feasible > 60);
  CHECK(infeasible > 5);  // the trust draws must exercise rejection too
}

TEST_CASE("link-based and exact path-based models agree on the optimum") {
  std::mt19937 rng(1234);
  int compared = 0;
  for (int trial = 0; trial < 25; ++trial) {
    auto net = random_net(rng);
    auto req = random_request(rng, trial);
    auto universe = build_path_universe(net, req, kUnlimitedPaths, EligibilityMode::TrustOn,
                                        PathTrustPolicy::MinLink);
    auto pb = build_pb_model(net, req, universe, PbVariant::PbNodeTrust);
    auto lb = build_link_based_model(net, req, LinkVariant::NodeTrust);
    auto got_pb = solve_milp(net, req, pb);
    auto got_lb = solve_milp(net, req, lb);
    REQUIRE((got_pb.status == SolveStatus::Infeasible) == (got_lb.status == SolveStatus::Infeasible));
    if (got_pb.status != SolveStatus::Optimal) continue;
    ++compared;
    CHECK_MESSAGE(got_pb.objective == doctest::Approx(got_lb.objective).epsilon(1e-6), "trial ", trial);
    // The reconstructed path flows must stand on their own.
    auto rep = validate_solution(net, req, *got_lb.solution, TrustMode::NodeTrust);
    CHECK_MESSAGE(rep.valid(), "trial ", trial);
    CHECK(got_lb.solution->bw_revenue == doctest::Approx(got_pb.solution->bw_revenue));
  }
  CHECK(compared > 10);
}

TEST_CASE("arc flow decomposition emits a colocation path for colocated endpoints") {
  std::vector<SubstrateNode> nodes{{0, "s0", NodeKind::Server, 16, 16, TrustValue(0.9)},
                                   {1, "s1", NodeKind::Server, 16, 16, TrustValue(0.2)},
                                   {2, "w", NodeKind::Switch, 0, 0, TrustValue(0.5)}};
  std::vector<SubstrateLink> links{{0, 2, 100, 100, TrustValue(0.8)}, {1, 2, 100, 100, TrustValue(0.8)}};
  SubstrateNetwork net(std::move(nodes), std::move(links));
  // Trust requirements admit only s0, so both VNFs land there.
  std::vector<Vnf> vnfs{{0, "a", 2, TrustValue(0.5)}, {1, "b", 2, TrustValue(0.5)}};
  ServiceRequest req(1, std::move(vnfs), {{0, 1, 40, TrustValue(0)}});
  auto m = build_link_based_model(net, req, LinkVariant::NodeTrust);
  auto got = solve_milp(net, req, m);
  REQUIRE(got.status == SolveStatus::Optimal);
  REQUIRE(got.solution->flows.size() == 1);
  CHECK(got.solution->flows[0].path.is_colocation());
  CHECK(got.solution->flows[0].amount == doctest::Approx(40.0));
  CHECK(got.solution->bw_cost == doctest::Approx(0.0));
  CHECK(validate_solution(net, req, *got.solution, TrustMode::NodeTrust).valid());
}

TEST_CASE("trivially infeasible models short-circuit with the builder's reason") {
  std::mt19937 rng(5);
  auto net = random_net(rng);
  std::vector<Vnf> vnfs{{0, "a", 2, TrustValue(0.99)}, {1, "b", 2, TrustValue(0.1)}};
  ServiceRequest req(1, std::move(vnfs), {{0, 1, 10, TrustValue(0)}});
  auto universe = build_path_universe(net, req, kUnlimitedPaths, EligibilityMode::TrustOn,
                                      PathTrustPolicy::MinLink);
  auto m = build_pb_model(net, req, universe, PbVariant::PbTasce);
  auto got = solve_milp(net, req, m);
  CHECK(got.status == SolveStatus::Infeasible);
  CHECK_FALSE(got.detail.empty());
  CHECK(got.stats.nodes_explored == 0);
}

TEST_CASE("an exhausted budget reports timeout, not infeasibility") {
  std::mt19937 rng(6);
  auto net = random_net(rng);
  auto req = random_request(rng, 1);
  auto universe = build_path_universe(net, req, kUnlimitedPaths, EligibilityMode::TrustOff,
                                      PathTrustPolicy::MinLink);
  auto m = build_pb_model(net, req, universe, PbVariant::PbSce);
  SolveBudget tight;
  tight.node_limit = 0;
  auto got = solve_milp(net, req, m, tight);
  CHECK(got.status == SolveStatus::Timeout);
  CHECK_FALSE(got.solution.has_value());
}

TEST_CASE("solver statistics are populated") {
  std::mt19937 rng(7);
  auto net = random_net(rng);
  auto req = random_request(rng, 1);
  auto universe = build_path_universe(net, req, kUnlimitedPaths, EligibilityMode::TrustOff,
                                      PathTrustPolicy::MinLink);
  auto m = build_pb_model(net, req, universe, PbVariant::PbSce);
  auto got = solve_milp(net, req, m);
  REQUIRE(got.status == SolveStatus::Optimal);
  CHECK(got.stats.nodes_explored >= 1);
  CHECK(got.stats.lp_iterations >= 1);
  CHECK(got.gap == 0.0);
  CHECK(got.solution->objective_value == doctest::Approx(got.objective));

  auto relax = solve_lp_relaxation(m);
  REQUIRE(relax.status == LpStatus::Optimal);
  CHECK(relax.objective <= got.objective + 1e-7);
}

TEST_CASE("oracle refuses oversized assignment spaces") {
  std::vector<SubstrateNode> nodes;
  for (int i = 0; i < 12; ++i) {
    nodes.push_back({i, "s" + std::to_string(i), NodeKind::Server, 100, 100, TrustValue(0.9)});
  }
  std::vector<SubstrateLink> links;
  for (int i = 1; i < 12; ++i) links.push_back({0, i, 1000, 1000, TrustValue(0.9)});
  SubstrateNetwork net(std::move(nodes), std::move(links));
  std::vector<Vnf> vnfs;
  std::vector<VirtualLink> vlinks;
  for (int i = 0; i < 6; ++i) {
    vnfs.push_back({i, "v", 1, TrustValue(0)});
    if (i) vlinks.push_back({i - 1, i, 1, TrustValue(0)});
  }
  ServiceRequest req(1, std::move(vnfs), std::move(vlinks));
  OracleOptions opt;
  opt.assignment_cap = 1000;
  CHECK_THROWS_AS(brute_force_oracle(net, req, PbVariant::PbSce, PathTrustPolicy::MinLink, nullptr, opt),
                  std::runtime_error);
}
