#include "npi/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "npi/analysis.hpp"
#include "npi/io.hpp"
#include "npi/svg.hpp"

namespace npi {

SimConfig reproduction_sim(double t_end, double sample_interval, double rel_tol, double abs_tol) {
  SimConfig sim;
  sim.method = Method::RKF45;
  sim.dt = 1e-6;
  sim.t_end = t_end;
  sim.rkf45.rel_tol = rel_tol;
  sim.rkf45.abs_tol = abs_tol;
  sim.divergence_threshold = 1e3;
  sim.sample_interval = sample_interval;
  return sim;
}

ExperimentConfig fig4_config(Fig4Controller which) {
  ExperimentConfig cfg;
  cfg.plant.sector = SectorFn{LinearSector{0.8}, 0.8, 0.8};
  cfg.plant.b = 0.05;
  cfg.plant.epsilon = 0.1;
  cfg.plant.topology = Topology::ActuatorPerturbed;
  cfg.init = InitialState{5.0, 0.0, 0.0};
  cfg.sim = reproduction_sim(100.0, 1e-2, 1e-8, 1e-11);
  constexpr double lambda = 0.15;
  switch (which) {
    case Fig4Controller::NG:
      cfg.name = "fig4_ng";
      cfg.controller = NgController{lambda};
      break;
    case Fig4Controller::NPI:
      cfg.name = "fig4_npi";
      cfg.controller = NpiController{lambda, BetaCosGain{IdentityBeta{}}};
      break;
    case Fig4Controller::NPIN:
      cfg.name = "fig4_npin";
      cfg.controller = NpiController{lambda, BetaCosGain{PowerBeta{2.0}}};
      break;
  }
  return cfg;
}

ExperimentConfig fig5_config() {
  ExperimentConfig cfg;
  cfg.name = "fig5";
  cfg.plant.sector = SectorFn{SinExpSector{3.0, 2.0}, -3.0, 9.0};
  cfg.plant.b = 1.0;
  cfg.plant.epsilon = 0.1;
  cfg.plant.topology = Topology::ActuatorPerturbed;
  cfg.controller = NpiController{0.5, BetaCosGain{ExpQuadraticBeta{1.0, 0.1}}};
  cfg.init = InitialState{5.0, 0.0, 0.0};
  cfg.sim = reproduction_sim(30.0, 1e-3, 1e-10, 1e-13);
  return cfg;
}

void apply(const Overrides& o, ExperimentConfig& cfg) {
  if (o.method) cfg.sim.method = *o.method;
  if (o.dt) cfg.sim.dt = *o.dt;
  if (o.t_end) cfg.sim.t_end = *o.t_end;
  if (o.epsilon) cfg.plant.epsilon = *o.epsilon;
  if (o.y0) cfg.init.y0 = *o.y0;
  if (o.u0) cfg.init.u0 = *o.u0;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult r;
  r.config = cfg;
  const auto start = std::chrono::steady_clock::now();
  r.trajectory = integrate(cfg.plant, cfg.controller, cfg.init, cfg.sim);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.verdict = classify(r.trajectory, kConvergenceTol, kTailFraction);
  return r;
}

bool Expectation::met() const { return result.verdict.cls == expected; }

std::string Expectation::summary() const {
  return run_summary(label + ": " + to_string(result.verdict.cls) + " (expected " +
                         to_string(expected) + ")",
                     result);
}

std::string run_summary(const std::string& head, const RunResult& result) {
  std::ostringstream os;
  os.precision(6);
  const Trajectory& tr = result.trajectory;
  os << head << "  termination=" << to_string(tr.termination) << " at t=" << tr.termination_time
     << "  |y(end)|=" << result.verdict.final_abs[0]
     << "  tail max=" << result.verdict.tail_max_abs << "  steps=" << tr.steps
     << "  " << result.seconds << " s";
  if (!tr.diagnostic.empty()) os << "  [" << tr.diagnostic << "]";
  return os.str();
}

std::vector<Expectation> reproduce_fig4(const Overrides& o) {
  const std::pair<Fig4Controller, std::pair<const char*, VerdictClass>> runs[] = {
      {Fig4Controller::NG, {"NG", VerdictClass::Diverged}},
      {Fig4Controller::NPI, {"nPI", VerdictClass::Diverged}},
      {Fig4Controller::NPIN, {"nPI-N", VerdictClass::Converged}},
  };
  std::vector<Expectation> out;
  for (const auto& [which, meta] : runs) {
    ExperimentConfig cfg = fig4_config(which);
    apply(o, cfg);
    out.push_back({meta.first, meta.second, run_experiment(cfg)});
  }
  return out;
}

Expectation reproduce_fig5(const Overrides& o) {
  ExperimentConfig cfg = fig5_config();
  apply(o, cfg);
  return {"nPI-N (nonlinear plant)", VerdictClass::Converged, run_experiment(cfg)};
}

std::vector<SweepCell> run_sweep(const ExperimentConfig& base, const std::vector<double>& epsilons,
                                 const std::vector<double>& lambdas, unsigned threads) {
  const std::size_t n = epsilons.size() * lambdas.size();
  if (n > 10000) throw std::invalid_argument("sweep grid exceeds 10^4 cells");
  std::vector<SweepCell> cells(n);
  for (std::size_t i = 0; i < epsilons.size(); ++i)
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      SweepCell& c = cells[i * lambdas.size() + j];
      c.epsilon = epsilons[i];
      c.lambda = lambdas[j];
      c.margin = 1.0 - c.epsilon * (c.lambda + base.plant.sector.declared_alpha2);
    }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      SweepCell& c = cells[k];
      ExperimentConfig cfg = base;
      cfg.plant.epsilon = c.epsilon;
      std::visit([&](auto& ctrl) { ctrl.lambda = c.lambda; }, cfg.controller);
      try {
        const Trajectory tr = integrate(cfg.plant, cfg.controller, cfg.init, cfg.sim);
        const Verdict v = classify(tr, kConvergenceTol, kTailFraction);
        c.verdict = to_string(v.cls);
        c.tail_max_abs_y = v.tail_max_abs_y;
      } catch (const std::invalid_argument&) {
        c.verdict = "Invalid";
        c.tail_max_abs_y = std::nan("");
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return cells;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::string out = "epsilon,lambda,verdict,tail_max_abs_y,margin\n";
  for (const SweepCell& c : cells) {
    out += format_double(c.epsilon) + ',' + format_double(c.lambda) + ',' + c.verdict + ',' +
           format_double(c.tail_max_abs_y) + ',' + format_double(c.margin) + '\n';
  }
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
      throw std::invalid_argument("bad grid value '" + s + "'");
    return v;
  };
  std::vector<double> out;
  if (text.empty()) return out;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c) ||
        c.find(':') != std::string::npos)
      throw std::invalid_argument("grid range must be start:stop:count");
    const double start = number(a), stop = number(b);
    const double count = number(c);
    if (count < 1 || count != std::floor(count) || count > 10000)
      throw std::invalid_argument("grid count must be an integer in [1, 10000]");
    const auto m = static_cast<int>(count);
    for (int i = 0; i < m; ++i)
      out.push_back(m == 1 ? start : (i == m - 1 ? stop : start + (stop - start) * i / (m - 1)));
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number(item));
  return out;
}

namespace {

// Symmetric range covering the signal once the initial transient has passed.
std::pair<double, double> settled_range(const Trajectory& tr, const std::vector<double>& col,
                                        double skip_fraction) {
  const double cut = tr.t.back() * skip_fraction;
  double m = 0.0;
  for (std::size_t i = 0; i < col.size(); ++i)
    if (tr.t[i] >= cut) m = std::max(m, std::abs(col[i]));
  if (!(m > 0.0)) m = 1.0;
  return {-1.1 * m, 1.1 * m};
}

}  // namespace

std::string fig4_svg(const std::vector<Expectation>& runs) {
  static const char* colors[] = {"#d62728", "#ff7f0e", "#1f77b4"};
  Panel panel;
  panel.y_label = "y(t)";
  panel.y_range = std::pair{-20.0, 20.0};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Trajectory& tr = runs[i].result.trajectory;
    panel.series.push_back({runs[i].label, tr.t, tr.y, colors[i % 3]});
  }
  return render_svg("Linear plant with actuator lag: output responses (clipped to |y| <= 20)", "t [s]",
                    {panel});
}

std::string fig5_svg(const Expectation& run) {
  const Trajectory& tr = run.result.trajectory;
  Panel py{"y(t)", {{"y", tr.t, tr.y, "#1f77b4"}}, std::nullopt};
  Panel pu{"u(t)", {{"u", tr.t, tr.u, "#2ca02c"}}, settled_range(tr, tr.u, 0.02)};
  Panel pn{"u_nom(t)", {{"u_nom", tr.t, tr.u_nom, "#d62728"}}, settled_range(tr, tr.u_nom, 0.02)};
  return render_svg("Sector-bounded plant with actuator lag (u panels clipped after 2% of the run)",
                    "t [s]", {py, pu, pn});
}

std::string trajectory_svg(const std::string& title, const Trajectory& tr) {
  Panel py{"y(t)", {{"y", tr.t, tr.y, "#1f77b4"}}, std::nullopt};
  Panel pu{"u, u_nom", {{"u", tr.t, tr.u, "#2ca02c"}, {"u_nom", tr.t, tr.u_nom, "#d62728"}},
           std::nullopt};
  Panel pz{"z", {{"z", tr.t, tr.z, "#9467bd"}}, std::nullopt};
  return render_svg(title, "t [s]", {py, pu, pz});
}

}  // namespace npi
