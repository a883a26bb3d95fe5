#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "capflow/config.hpp"
#include "capflow/errors.hpp"
#include "capflow/flow.hpp"
#include "capflow/parallel.hpp"
#include "capflow/quermass.hpp"
#include "capflow/verify.hpp"
#include "json.hpp"

namespace {

using namespace capflow;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kNumerical = 2;
constexpr int kConfig = 3;

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

nlohmann::json finite(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

std::string trace_json(const flow::FlowTrace& trace) {
  const auto cols = flow::trace_columns(trace.config.n);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : trace.rows) {
    nlohmann::json row;
    row["t"] = r.t;
    for (int k = 0; k <= trace.config.n + 1; ++k) row["W" + std::to_string(k)] = finite(r.W.W(k));
    row["maxF"] = finite(r.max_F);
    row["maxH"] = finite(r.max_H);
    row["Q"] = finite(r.Q);
    for (std::size_t k = 0; k < r.phi.size(); ++k) row["phi_" + std::to_string(k + 1)] = finite(r.phi[k]);
    row["height_min"] = r.height_min;
    row["height_max"] = r.height_max;
    row["angle_residual"] = r.angle_residual;
    row["kappa_min"] = r.kappa_min;
    row["dt"] = r.dt;
    rows.push_back(row);
  }
  return nlohmann::json{{"columns", cols}, {"rows", rows}}.dump(1);
}

config::RunConfig load(const std::string& path, const std::optional<std::string>& out,
                       const std::optional<std::string>& format, const std::optional<std::uint64_t>& seed) {
  auto cfg = path.empty() ? config::parse_run_config("{}") : config::load_run_config(path);
  if (out) cfg.output_dir = *out;
  if (format) config::set_formats(cfg, *format);
  if (seed) cfg.seed = *seed;
  return cfg;
}

int cmd_flow(const config::RunConfig& cfg) {
  auto trace = flow::run(cfg.flow, config::initial_grid(cfg));
  if (cfg.emits("csv")) write_file(cfg.output_dir / "trace.csv", flow::trace_csv(trace));
  if (cfg.emits("json")) write_file(cfg.output_dir / "trace.json", trace_json(trace));
  nlohmann::json summary{{"flow", flow::to_string(cfg.flow.kind)},
                         {"n", cfg.flow.n},
                         {"theta", cfg.flow.theta},
                         {"n_beta", cfg.flow.n_beta},
                         {"steps", trace.steps},
                         {"rows", trace.rows.size()},
                         {"stop_reason", flow::to_string(trace.reason)},
                         {"message", trace.message},
                         {"seed", cfg.seed},
                         {"csv_schema", "v1"},
                         {"columns", flow::trace_columns(cfg.flow.n)}};
  if (!trace.rows.empty()) {
    summary["t_final"] = trace.rows.back().t;
    summary["tstar_remaining"] = finite(trace.rows.back().tstar_remaining);
  }
  write_file(cfg.output_dir / "summary.json", summary.dump(2) + "\n");
  std::cout << "flow stopped: " << flow::to_string(trace.reason) << " after " << trace.steps << " steps\n";
  return kOk;
}

std::vector<verify::CheckReport> run_suite(const std::string& suite, const config::RunConfig& cfg) {
  std::vector<verify::CheckReport> out;
  auto append = [&](std::vector<verify::CheckReport> r) { out.insert(out.end(), r.begin(), r.end()); };
  const int n = cfg.flow.n;
  const bool all = suite == "all";
  if (all || suite == "identities") append(verify::check_identities());
  if (all || suite == "pointwise") {
    const auto fields = geometry::fundamental_forms(config::initial_grid(cfg));
    append(verify::check_pointwise_lemmas(fields));
    out.push_back(verify::check_height_estimate(fields, quermass::assemble_W(fields)));
    append(verify::check_symfunc_properties(cfg.seed, cfg.samples));
  }
  if (all || suite == "af_main") {
    const auto W = config::fixture_quermass(cfg);
    std::optional<double> kmin;
    if (!cfg.quermass) kmin = geometry::convexity_report(geometry::fundamental_forms(config::initial_grid(cfg))).kappa_min;
    if (n < 3) throw ConfigError("af_main needs n >= 3");
    for (int k = 1; 2 * k + 1 <= n; ++k) out.push_back(verify::check_af_main(W, n, k, kmin, cfg.af_tolerance));
  }
  if (all || suite == "af_thmB" || suite == "af_thmC") {
    const auto W = config::fixture_quermass(cfg);
    const quermass::CapTable table(n, cfg.flow.theta,
                                   cfg.captable.radii.value_or(quermass::CapTable::default_radii()),
                                   cfg.captable.n_beta);
    if (all || suite == "af_thmC")
      for (int k = 1; k <= n; ++k) out.push_back(verify::check_af_thmC(W, table, k, cfg.table_tolerance));
    if (all || suite == "af_thmB")
      for (int k = 0; k < n; ++k) out.push_back(verify::check_af_thmB(W, table, k, cfg.table_tolerance));
  }
  if (all || suite == "limits" || suite == "variational") {
    const auto trace = flow::run(cfg.flow, config::initial_grid(cfg));
    if (all || suite == "limits") {
      for (int k = 0; 2 * k + 1 <= n; ++k) out.push_back(verify::check_limits(trace, k));
      if (n >= 3) out.push_back(verify::check_limit_Q(trace));
    }
    if (all || suite == "variational") out.push_back(verify::check_variational(trace));
  }
  return out;
}

int cmd_verify(const std::string& suite, const config::RunConfig& cfg) {
  static const std::set<std::string> suites{"identities", "pointwise", "af_main", "af_thmB",
                                            "af_thmC",    "limits",    "variational", "all"};
  if (!suites.count(suite)) throw ConfigError("unknown suite '" + suite + "'");
  const auto reports = run_suite(suite, cfg);
  write_file(cfg.output_dir / ("verify_" + suite + ".json"), verify::reports_json(reports) + "\n");
  std::cout << verify::summary_table(reports);
  const bool failed = std::any_of(reports.begin(), reports.end(),
                                  [](const verify::CheckReport& r) { return r.verdict == verify::Verdict::fail; });
  return failed ? kCheckFailed : kOk;
}

struct CapTableArgs {
  std::optional<int> n;
  std::optional<double> theta;
  std::vector<int> ks;
};

int cmd_captable(const config::RunConfig& cfg, const CapTableArgs& args) {
  const int n = args.n.value_or(cfg.flow.n);
  const double theta = args.theta.value_or(cfg.flow.theta);
  if (n < 2) throw ConfigError("n must be at least 2");
  if (!(theta > 0 && theta <= std::numbers::pi / 2 + 1e-15)) throw ConfigError("theta must lie in (0, pi/2]");
  const auto radii = cfg.captable.radii.value_or(quermass::CapTable::default_radii());
  if (radii.empty()) throw ConfigError("radius grid is empty");
  for (double r : radii)
    if (!(r > 0) || !std::isfinite(r)) throw ConfigError("radii must be positive and finite");
  auto ks = args.ks.empty() ? cfg.captable.ks : args.ks;
  if (ks.empty())
    for (int k = 0; k <= n + 1; ++k) ks.push_back(k);
  for (int k : ks)
    if (k < 0 || k > n + 1) throw ConfigError("k must lie in [0, n+1]");
  const auto table = quermass::cap_reference_f(n, theta, radii, cfg.captable.n_beta);
  if (cfg.emits("csv")) write_file(cfg.output_dir / "captable.csv", table.to_csv(ks));
  if (cfg.emits("json")) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < table.rows().size(); ++i) {
      nlohmann::json row;
      row["r"] = i < table.radii().size() ? nlohmann::json(table.radii()[i]) : nlohmann::json("inf");
      for (int k : ks) row["f" + std::to_string(k)] = table.rows()[i][k];
      rows.push_back(row);
    }
    write_file(cfg.output_dir / "captable.json",
               nlohmann::json{{"n", n}, {"theta", theta}, {"rows", rows}}.dump(1) + "\n");
  }
  std::cout << "cap table: " << table.rows().size() << " rows\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capflow: capillary curvature flows and quermassintegral inequalities"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::string> out_dir, format;
  std::optional<std::uint64_t> seed;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--format", format, "emit format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "seed for sampled checks");
  };
  auto* flow_cmd = app.add_subcommand("flow", "run a flow and write its monitor trace");
  add_common(flow_cmd);
  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
  std::string suite;
  verify_cmd->add_option("suite", suite, "identities|pointwise|af_main|af_thmB|af_thmC|limits|variational|all")
      ->required();
  add_common(verify_cmd);
  auto* table_cmd = app.add_subcommand("captable", "emit the cap-family quermassintegral table");
  CapTableArgs targs;
  table_cmd->add_option("--n", targs.n, "dimension");
  table_cmd->add_option("--theta", targs.theta, "contact angle in radians");
  table_cmd->add_option("--k", targs.ks, "indices to emit");
  add_common(table_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    capflow::configure_threads_from_env();
    const auto cfg = load(config_path, out_dir, format, seed);
    if (*flow_cmd) return cmd_flow(cfg);
    if (*verify_cmd) return cmd_verify(suite, cfg);
    return cmd_captable(cfg, targs);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const WrongTheoremError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const RangeError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}
