// sfce: trust-aware service chain embedding from the command line.
//
// Subcommands:
//   embed       solve one embedding instance and print the solution
//   paths       list a commodity's candidate augmented paths
//   experiment  run a full simulation sweep and emit CSV artifacts
//
// Exit codes for `embed`: 0 accepted, 2 infeasible, 3 timeout, 4 numerical
// failure, 1 usage or input error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <sfce/json_io.hpp>
#include <sfce/simulator.hpp>
#include <sfce/solver.hpp>

namespace fs = std::filesystem;
using namespace sfce;

namespace {

PathTrustPolicy parse_policy(const std::string& s) {
  if (s == "min_link") return PathTrustPolicy::MinLink;
  if (s == "product_link") return PathTrustPolicy::ProductLink;
  if (s == "assigned") return PathTrustPolicy::Assigned;
  throw CLI::ValidationError("--trust-policy", "expected min_link, product_link or assigned");
}

std::string node_label(const SubstrateNetwork& net, int id) {
  const auto& n = net.node(id);
  return n.name.empty() ? std::to_string(id) : n.name + " (" + std::to_string(id) + ")";
}

std::string seq_string(const AugmentedPath& p) {
  std::string s;
  for (std::size_t i = 0; i < p.node_seq.size(); ++i) {
    if (i) s += "-";
    s += std::to_string(p.node_seq[i]);
  }
  return s;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string file_checksum(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  char hex[32];
  std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(buf.str())));
  return hex;
}

struct EmbedArgs {
  std::string substrate_file, request_file;
  int k = 12;  // 0 = unlimited
  std::string variant = "pb_sce";
  double gamma = 1.0;
  std::string trust_policy = "min_link";
  std::string trust_table_file;
  double time_limit_s = 10.0;
  bool oracle = false;
  bool dump = false;
  std::string out_file;
};

int run_embed(const EmbedArgs& a) {
  auto net = load_substrate(a.substrate_file);
  auto req = load_request(a.request_file);
  PathTrustPolicy policy = parse_policy(a.trust_policy);
  PathTrustTable table;
  if (!a.trust_table_file.empty()) {
    table = trust_table_from_json(load_json_file(a.trust_table_file));
  } else if (policy == PathTrustPolicy::Assigned) {
    throw CLI::ValidationError("--trust-policy", "assigned policy needs --trust-table");
  }

  ExperimentConfig probe;
  probe.variant = a.variant;
  Method method = method_from_config(probe);  // validates the variant name
  int k = a.k == 0 ? kUnlimitedPaths : a.k;

  EmbeddingModel model;
  ExtractionContext ctx;
  ctx.policy = policy;
  ctx.trust_table = table.empty() ? nullptr : &table;
  if (method.kind == MethodKind::LinkBased) {
    model = build_link_based_model(net, req, method.link_variant, a.gamma);
  } else {
    auto universe = build_path_universe(net, req, k, eligibility_mode(method.variant), policy,
                                        table.empty() ? nullptr : &table);
    PbModelOptions opt;
    opt.gamma = a.gamma;
    model = build_pb_model(net, req, universe, method.variant, opt);
  }
  if (a.dump) std::cout << dump_model(model);

  SolveBudget budget;
  budget.time_limit_s = a.time_limit_s;
  auto result = solve_milp(net, req, model, budget, ctx);

  switch (result.status) {
    case SolveStatus::Optimal: std::cout << "status: accepted\n"; break;
    case SolveStatus::Infeasible: std::cout << "status: infeasible\n"; break;
    case SolveStatus::Timeout: std::cout << "status: timeout\n"; break;
    case SolveStatus::NumericalFailure: std::cout << "status: numerical_failure\n"; break;
  }
  if (!result.detail.empty()) std::cout << "reason: " << result.detail << "\n";

  if (result.solution) {
    const auto& sol = *result.solution;
    std::cout << "objective: " << result.objective << "\n";
    for (const auto& [i, u] : sol.assignment) {
      std::cout << "vnf " << i << " (" << req.vnf(i).function_type << ") -> "
                << node_label(net, u) << "\n";
    }
    for (const auto& fa : sol.flows) {
      std::cout << "flow (" << fa.path.vsrc << "," << fa.path.vdst << "): " << fa.amount
                << " via " << seq_string(fa.path) << " cost " << fa.path.cost << " trust "
                << fa.path.trust.value() << "\n";
    }
    std::cout << "bw_revenue: " << sol.bw_revenue << "  bw_cost: " << sol.bw_cost
              << "  cpu_revenue: " << sol.cpu_revenue << "  cpu_cost: " << sol.cpu_cost << "\n";
    if (!a.out_file.empty()) save_json_file(a.out_file, to_json(sol));
  }
  std::cout << "solver: nodes=" << result.stats.nodes_explored
            << " lp_iterations=" << result.stats.lp_iterations << " time="
            << result.stats.wall_time_s << "s\n";

  if (a.oracle) {
    PbVariant ov = method.kind == MethodKind::Kpb ? method.variant
                   : method.link_variant == LinkVariant::Sce ? PbVariant::PbSce
                                                             : PbVariant::PbNodeTrust;
    OracleOptions oopt;
    oopt.gamma = a.gamma;
    auto oracle = brute_force_oracle(net, req, ov, policy, table.empty() ? nullptr : &table, oopt);
    if (oracle.status == SolveStatus::Optimal) {
      std::cout << "oracle objective: " << oracle.objective << "\n";
    } else {
      std::cout << "oracle: infeasible\n";
    }
  }

  switch (result.status) {
    case SolveStatus::Optimal: return 0;
    case SolveStatus::Infeasible: return 2;
    case SolveStatus::Timeout: return 3;
    default: return 4;
  }
}

struct PathsArgs {
  std::string substrate_file, request_file;
  std::vector<int> commodity;
  int k = 0;  // 0 = unlimited
  std::string variant = "pb_sce";
  std::string trust_policy = "min_link";
  std::string trust_table_file;
};

int run_paths(const PathsArgs& a) {
  auto net = load_substrate(a.substrate_file);
  auto req = load_request(a.request_file);
  PathTrustPolicy policy = parse_policy(a.trust_policy);
  PathTrustTable table;
  if (!a.trust_table_file.empty()) table = trust_table_from_json(load_json_file(a.trust_table_file));

  ExperimentConfig probe;
  probe.variant = a.variant;
  Method method = method_from_config(probe);
  if (method.kind == MethodKind::LinkBased) {
    throw CLI::ValidationError("--variant", "paths applies to path-based variants only");
  }
  int k = a.k == 0 ? kUnlimitedPaths : a.k;
  auto universe = build_path_universe(net, req, k, eligibility_mode(method.variant), policy,
                                      table.empty() ? nullptr : &table);
  const auto& paths = universe.paths_for(a.commodity[0], a.commodity[1]);
  std::cout << "commodity (" << a.commodity[0] << "," << a.commodity[1] << "): " << paths.size()
            << " candidate paths\n";
  for (const auto& p : paths) {
    std::cout << (p.is_colocation() ? "colocation " : "path       ") << seq_string(p) << "  hops "
              << p.hop_count() << "  cost " << p.cost << "  trust " << p.trust.value() << "\n";
  }
  return 0;
}

struct ExperimentArgs {
  std::string config_file;
  std::string experiment;
  std::string out_dir;
};

int run_experiment(const ExperimentArgs& a) {
  auto cfg = load_config(a.config_file);
  ExperimentReport report = a.experiment == "A" ? run_experiment_A(cfg) : run_experiment_B(cfg);

  fs::path out(a.out_dir);
  fs::create_directories(out);
  auto write = [&](const char* name, auto&& emit) {
    std::ofstream os(out / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (out / name).string());
    emit(os);
  };
  write("windows.csv", [&](std::ostream& os) { write_windows_csv(os, report); });
  write("summary.csv", [&](std::ostream& os) { write_summary_csv(os, report); });
  write("size_cdf.csv", [&](std::ostream& os) { write_size_cdf_csv(os, report); });
  write("requests.jsonl", [&](std::ostream& os) {
    for (const auto& [m, s] : report.series) write_requests_jsonl(os, m, s);
  });

  json manifest;
  manifest["experiment"] = a.experiment;
  manifest["seed"] = cfg.seed;
  manifest["config"] = to_json(cfg);
  manifest["output_dir"] = out.string();
  json methods = json::array();
  for (const auto& [m, s] : report.series) {
    (void)s;
    methods.push_back(m.name());
  }
  manifest["methods"] = methods;
  json artifacts = json::object();
  for (const char* name : {"windows.csv", "summary.csv", "size_cdf.csv", "requests.jsonl"}) {
    artifacts[name] = file_checksum(out / name);
  }
  manifest["artifacts"] = artifacts;
  save_json_file((out / "manifest.json").string(), manifest);

  for (const auto& [m, s] : report.series) {
    std::cout << m.name() << ": accepted " << s.total_accepted << "/" << s.total_arrivals
              << "  steady acceptance " << s.steady_acceptance << "  steady utilization "
              << s.steady_utilization << "\n";
  }
  std::cout << "artifacts in " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-aware service function chain embedding"};
  app.require_subcommand(1);

  const char* env_out = std::getenv("SFCE_OUT_DIR");
  std::string default_out = env_out ? env_out : "results";

  EmbedArgs embed;
  auto* cmd_embed = app.add_subcommand("embed", "Solve one embedding instance");
  cmd_embed->add_option("substrate", embed.substrate_file, "Substrate JSON")->required();
  cmd_embed->add_option("request", embed.request_file, "Service request JSON")->required();
  cmd_embed->add_option("--k", embed.k, "Candidate paths per commodity, 0 = unlimited");
  cmd_embed->add_option("--variant", embed.variant,
                        "pb_sce | pb_node_trust | pb_tasce | link_based | link_node_trust");
  cmd_embed->add_option("--gamma", embed.gamma, "Placement cost weight");
  cmd_embed->add_option("--trust-policy", embed.trust_policy, "min_link | product_link | assigned");
  cmd_embed->add_option("--trust-table", embed.trust_table_file, "Path trust table JSON");
  cmd_embed->add_option("--time-limit", embed.time_limit_s, "Solver time limit in seconds");
  cmd_embed->add_flag("--oracle", embed.oracle, "Cross-check against exhaustive enumeration");
  cmd_embed->add_flag("--dump-model", embed.dump, "Print the MILP before solving");
  cmd_embed->add_option("--out", embed.out_file, "Write the solution JSON here");

  PathsArgs paths;
  auto* cmd_paths = app.add_subcommand("paths", "List candidate augmented paths");
  cmd_paths->add_option("substrate", paths.substrate_file, "Substrate JSON")->required();
  cmd_paths->add_option("request", paths.request_file, "Service request JSON")->required();
  cmd_paths->add_option("--commodity", paths.commodity, "Virtual link endpoints i j")
      ->expected(2)
      ->required();
  cmd_paths->add_option("--k", paths.k, "Candidate paths, 0 = unlimited");
  cmd_paths->add_option("--variant", paths.variant, "Path-based variant for eligibility");
  cmd_paths->add_option("--trust-policy", paths.trust_policy, "min_link | product_link | assigned");
  cmd_paths->add_option("--trust-table", paths.trust_table_file, "Path trust table JSON");

  ExperimentArgs exp;
  exp.out_dir = default_out;
  auto* cmd_exp = app.add_subcommand("experiment", "Run a simulation sweep");
  cmd_exp->add_option("config", exp.config_file, "Experiment config JSON")->required();
  cmd_exp->add_option("--experiment", exp.experiment, "A (k sweep) or B (trust ablation)")
      ->required()
      ->check(CLI::IsMember({"A", "B"}));
  cmd_exp->add_option("--out", exp.out_dir, "Output directory (default $SFCE_OUT_DIR or ./results)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_embed->parsed()) return run_embed(embed);
    if (cmd_paths->parsed()) return run_paths(paths);
    return run_experiment(exp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
