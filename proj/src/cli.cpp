#include "npi/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "npi/analysis.hpp"
#include "npi/config.hpp"
#include "npi/experiments.hpp"
#include "npi/io.hpp"

namespace npi {

namespace {

namespace fs = std::filesystem;

/// A problem with the invocation or its inputs; maps to kExitConfig.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunFlags {
  std::string config;
  std::string out;
  bool expect_converge = false;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::string method;
  std::optional<double> epsilon;
  std::optional<double> y0;
  std::optional<double> u0;
};

fs::path out_dir(const RunFlags& f) {
  if (!f.out.empty()) return f.out;
  if (const char* env = std::getenv("NPI_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

Overrides overrides(const RunFlags& f) {
  Overrides o;
  o.dt = f.dt;
  o.t_end = f.t_end;
  o.epsilon = f.epsilon;
  o.y0 = f.y0;
  o.u0 = f.u0;
  if (f.method == "rk4") o.method = Method::RK4;
  if (f.method == "rkf45") o.method = Method::RKF45;
  return o;
}

void add_output(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--out", f.out, "Output directory (default: $NPI_OUT_DIR, else .)");
}

void add_sim_overrides(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--dt", f.dt, "Step size (RK4) or initial step (RKF45)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--t-end", f.t_end, "Final time")->check(CLI::PositiveNumber);
  cmd->add_option("--method", f.method, "Integrator")->check(CLI::IsMember({"rk4", "rkf45"}));
}

ExperimentConfig load(const RunFlags& f) {
  ExperimentConfig cfg = load_config(f.config);
  apply(overrides(f), cfg);
  validate(cfg.sim, cfg.plant);
  return cfg;
}

void write(const fs::path& path, const std::string& content, std::ostream& out) {
  write_file_atomic(path, content);
  out << "wrote " << path.string() << '\n';
}

int finish_expectations(const std::vector<Expectation>& runs, std::ostream& out) {
  bool ok = true;
  for (const Expectation& e : runs) ok = ok && e.met();
  if (ok) {
    out << "all verdicts as expected\n";
    return kExitOk;
  }
  out << "unexpected verdicts:\n";
  for (const Expectation& e : runs)
    if (!e.met())
      out << "  - " << e.label << ": expected " << to_string(e.expected) << ", got "
          << to_string(e.result.verdict.cls) << '\n';
  return kExitUnexpected;
}

int cmd_simulate(const RunFlags& f, std::ostream& out) {
  const ExperimentConfig cfg = load(f);
  const RunResult r = run_experiment(cfg);
  const fs::path dir = out_dir(f);
  write(dir / cfg.csv_name(), trajectory_csv(r.trajectory), out);
  if (!cfg.output.svg.empty())
    write(dir / cfg.output.svg, trajectory_svg(cfg.name, r.trajectory), out);
  out << run_summary(cfg.name + ": " + to_string(r.verdict.cls), r) << '\n';
  if (f.expect_converge && r.verdict.cls != VerdictClass::Converged) {
    out << "expected Converged\n";
    return kExitUnexpected;
  }
  return kExitOk;
}

int cmd_certify(const RunFlags& f, std::ostream& out) {
  const ExperimentConfig cfg = load_config(f.config);
  const auto* npi = std::get_if<NpiController>(&cfg.controller);
  if (npi == nullptr) throw UsageError("certify needs controller.kind = npi");
  const CertificateReport report = certify(cfg.plant, *npi, cfg.ell_factor);
  const fs::path dir = out_dir(f);
  const std::string text = format_report_text(report);
  write(dir / (cfg.report_name() + ".txt"), text, out);
  write(dir / (cfg.report_name() + ".kv"), format_report_kv(report), out);
  out << text;
  return report.certified() ? kExitOk : kExitUnexpected;
}

struct NfFlags {
  std::string builtin;
  double zeta_max = 5000.0;
  int n_grid = 1000000;
  double gate = 1e3;
};

std::string nf_csv(const NussbaumVerdict& v) {
  std::string csv = "direction,window_end,running_sup,running_inf\n";
  auto rows = [&](const char* dir, const DirectionalAverages& a) {
    for (std::size_t i = 0; i < a.window_end.size(); ++i)
      csv += std::string(dir) + ',' + format_double(a.window_end[i]) + ',' +
             format_double(a.running_sup[i]) + ',' + format_double(a.running_inf[i]) + '\n';
  };
  rows("positive", v.positive);
  rows("negative", v.negative);
  return csv;
}

int cmd_check_nf(const RunFlags& f, const NfFlags& nf, std::ostream& out) {
  if (f.config.empty() == nf.builtin.empty())
    throw UsageError("check-nf needs exactly one of --config or --builtin");
  std::function<double(double)> n;
  std::string label = nf.builtin;
  if (nf.builtin == "zcos") {
    n = [](double s) { return s * std::cos(s); };
  } else if (nf.builtin == "z2cos") {
    n = [](double s) { return s * s * std::cos(s); };
  } else if (nf.builtin == "z2sin") {
    n = [](double s) { return s * s * std::sin(s); };
  } else {
    const ExperimentConfig cfg = load_config(f.config);
    if (const auto* npi = std::get_if<NpiController>(&cfg.controller)) {
      n = two_sided(npi->gain);
      label = describe(npi->gain);
    } else {
      n = ng_gain;
      label = "zeta^2 cos(zeta)";
    }
  }
  NussbaumOptions opts;
  opts.growth_gate = nf.gate;
  const NussbaumVerdict v = nussbaum_index(n, nf.zeta_max, nf.n_grid, opts);
  write(out_dir(f) / "nf_index.csv", nf_csv(v), out);
  out << "gain: " << label << '\n' << "classification: " << to_string(v.classification) << '\n';
  if (v.witness_bound) out << "witness bound: " << *v.witness_bound << '\n';
  if (!v.positive.running_sup.empty())
    out << "final running sup/inf (+): " << v.positive.running_sup.back() << " / "
        << v.positive.running_inf.back() << '\n';
  if (!v.negative.running_sup.empty())
    out << "final running sup/inf (-): " << v.negative.running_sup.back() << " / "
        << v.negative.running_inf.back() << '\n';
  out << v.diagnostic << '\n';
  return v.classification == NussbaumClass::LikelyNussbaum ? kExitOk : kExitUnexpected;
}

struct BetaFlags {
  std::string family;
  double p = 2.0;
  double c1 = 1.0;
  double c2 = 1.0;
  std::string c = "0.1,1,10";
  std::string delta = "0.01,0.1,1,5";
};

int cmd_check_beta(const RunFlags& f, const BetaFlags& bf, std::ostream& out) {
  if (f.config.empty() == bf.family.empty())
    throw UsageError("check-beta needs exactly one of --config or --beta");
  BetaSpec beta;
  if (bf.family == "power") {
    beta = PowerBeta{bf.p};
  } else if (bf.family == "expquad") {
    beta = ExpQuadraticBeta{bf.c1, bf.c2};
  } else if (bf.family == "identity") {
    beta = IdentityBeta{};
  } else {
    const ExperimentConfig cfg = load_config(f.config);
    const auto* npi = std::get_if<NpiController>(&cfg.controller);
    const auto* bc = npi ? std::get_if<BetaCosGain>(&npi->gain) : nullptr;
    if (bc == nullptr) throw UsageError("check-beta needs an npi controller with a beta family");
    beta = bc->beta;
  }
  validate(beta);
  const std::vector<double> cs = parse_grid(bf.c);
  const std::vector<double> deltas = parse_grid(bf.delta);
  if (cs.empty() || deltas.empty()) throw UsageError("check-beta needs nonempty --c and --delta");
  for (const double c : cs)
    if (!(c > 0.0)) throw UsageError("check-beta needs c > 0");
  for (const double d : deltas)
    if (!(d > 0.0)) throw UsageError("check-beta needs delta > 0");

  const std::vector<double> grid = default_growth_grid();
  std::string csv = "c,delta,passes,g_final_sign,g_final_log_abs\n";
  int failures = 0;
  out << "beta: " << describe(beta) << '\n';
  for (const double c : cs)
    for (const double d : deltas) {
      const BetaGrowthResult r = check_beta_growth(beta, c, d, grid);
      const GrowthSample& last = r.values.back();
      if (!r.passes) ++failures;
      out << "  c=" << c << " delta=" << d << ": " << (r.passes ? "pass" : "FAIL")
          << "  g(" << last.z << ") = " << (last.sign < 0 ? "-" : "") << "exp(" << last.log_abs
          << ")\n";
      csv += format_double(c) + ',' + format_double(d) + ',' + (r.passes ? "1" : "0") + ',' +
             std::to_string(last.sign) + ',' + format_double(last.log_abs) + '\n';
    }
  write(out_dir(f) / "beta_growth.csv", csv, out);
  out << (failures == 0 ? "growth property holds on every case\n"
                        : std::to_string(failures) + " case(s) fail\n");
  return failures == 0 ? kExitOk : kExitUnexpected;
}

int cmd_fig4(const RunFlags& f, std::ostream& out) {
  if (f.epsilon || f.y0 || f.u0) throw UsageError("reproduce-fig4 accepts --dt, --t-end, --method");
  const std::vector<Expectation> runs = reproduce_fig4(overrides(f));
  const fs::path dir = out_dir(f);
  for (const Expectation& e : runs) {
    write(dir / e.result.config.csv_name(), trajectory_csv(e.result.trajectory), out);
    out << e.summary() << '\n';
  }
  write(dir / "fig4_y.svg", fig4_svg(runs), out);
  return finish_expectations(runs, out);
}

int cmd_fig5(const RunFlags& f, std::ostream& out) {
  const Expectation e = reproduce_fig5(overrides(f));
  const fs::path dir = out_dir(f);
  write(dir / "fig5.csv", trajectory_csv(e.result.trajectory), out);
  write(dir / "fig5.svg", fig5_svg(e), out);
  out << e.summary() << '\n';
  return finish_expectations({e}, out);
}

struct SweepFlags {
  std::string eps;
  std::string lambda;
  unsigned threads = 0;
};

int cmd_sweep(const RunFlags& f, const SweepFlags& sf, std::ostream& out) {
  const ExperimentConfig cfg = load(f);
  const std::vector<double> eps = parse_grid(sf.eps);
  const std::vector<double> lambdas = parse_grid(sf.lambda);
  const std::vector<SweepCell> cells = run_sweep(cfg, eps, lambdas, sf.threads);
  write(out_dir(f) / (cfg.name + "_sweep.csv"), sweep_csv(cells), out);
  for (const SweepCell& c : cells)
    out << "  epsilon=" << c.epsilon << " lambda=" << c.lambda << " margin=" << c.margin << ": "
        << c.verdict << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--seedless") == 0) {
      err << "error: --seedless is reserved and not accepted (npi_lab uses no randomness)\n";
      return kExitConfig;
    }

  CLI::App app{"Closed-loop experiments with Nussbaum-type PI controllers and actuator lag",
               "npi_lab"};
  app.require_subcommand(1);
  RunFlags f;
  NfFlags nf;
  BetaFlags bf;
  SweepFlags sf;

  auto* simulate = app.add_subcommand("simulate", "Run one closed loop from a config file");
  simulate->add_option("--config", f.config, "Config file")->required();
  simulate->add_flag("--expect-converge", f.expect_converge,
                     "Exit 1 unless the verdict is Converged");
  add_sim_overrides(simulate, f);
  add_output(simulate, f);

  auto* cert = app.add_subcommand("certify", "Check the stability certificate of a config");
  cert->add_option("--config", f.config, "Config file")->required();
  add_output(cert, f);

  auto* check_nf = app.add_subcommand("check-nf", "Estimate whether a gain is a Nussbaum function");
  check_nf->add_option("--config", f.config, "Config file whose controller gain is checked");
  check_nf->add_option("--builtin", nf.builtin, "Reference gain")
      ->check(CLI::IsMember({"zcos", "z2cos", "z2sin"}));
  check_nf->add_option("--zeta-max", nf.zeta_max, "Upper end of the quadrature range")
      ->check(CLI::PositiveNumber);
  check_nf->add_option("--n-grid", nf.n_grid, "Quadrature intervals per direction")
      ->check(CLI::Range(100, 100000000));
  check_nf->add_option("--gate", nf.gate, "Growth gate")->check(CLI::PositiveNumber);
  add_output(check_nf, f);

  auto* check_beta = app.add_subcommand("check-beta", "Check the beta growth property");
  check_beta->add_option("--config", f.config, "Config file whose beta is checked");
  check_beta->add_option("--beta", bf.family, "Beta family")
      ->check(CLI::IsMember({"power", "expquad", "identity"}));
  check_beta->add_option("--p", bf.p, "Power exponent");
  check_beta->add_option("--c1", bf.c1, "Exp-quadratic scale");
  check_beta->add_option("--c2", bf.c2, "Exp-quadratic rate");
  check_beta->add_option("--c", bf.c, "Grid of c values");
  check_beta->add_option("--delta", bf.delta, "Grid of delta values");
  add_output(check_beta, f);

  auto* fig4 = app.add_subcommand("reproduce-fig4", "NG, nPI and nPI-N on the linear plant");
  add_sim_overrides(fig4, f);
  add_output(fig4, f);

  auto* fig5 = app.add_subcommand("reproduce-fig5", "nPI-N on the sector-bounded plant");
  add_sim_overrides(fig5, f);
  fig5->add_option("--epsilon", f.epsilon, "Actuator time constant")->check(CLI::PositiveNumber);
  fig5->add_option("--y0", f.y0, "Initial output");
  fig5->add_option("--u0", f.u0, "Initial actuator state");
  add_output(fig5, f);

  auto* sweep = app.add_subcommand("sweep", "Verdict map over an (epsilon, lambda) grid");
  sweep->add_option("--config", f.config, "Base config file")->required();
  sweep->add_option("--eps", sf.eps, "epsilon grid: a,b,c or start:stop:count");
  sweep->add_option("--lambda", sf.lambda, "lambda grid: a,b,c or start:stop:count");
  sweep->add_option("--threads", sf.threads, "Worker threads (0: all cores)");
  add_sim_overrides(sweep, f);
  add_output(sweep, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(f, out);
    if (cert->parsed()) return cmd_certify(f, out);
    if (check_nf->parsed()) return cmd_check_nf(f, nf, out);
    if (check_beta->parsed()) return cmd_check_beta(f, bf, out);
    if (fig4->parsed()) return cmd_fig4(f, out);
    if (fig5->parsed()) return cmd_fig5(f, out);
    if (sweep->parsed()) return cmd_sweep(f, sf, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace npi
