#pragma once

#include <optional>
#include <string>
#include <vector>

#include "npi/config.hpp"
#include "npi/simcore.hpp"

namespace npi {

/// Verdict thresholds used by every harness command.
inline constexpr double kConvergenceTol = 1e-2;
inline constexpr double kTailFraction = 0.1;

/// Adaptive settings used by the reproductions. Fixed-step RK4 at
/// millisecond steps cannot follow the fast gain-driven oscillation of
/// these loops (see README).
SimConfig reproduction_sim(double t_end, double sample_interval, double rel_tol, double abs_tol);

enum class Fig4Controller { NG, NPI, NPIN };

/// RKF45 at rel_tol 1e-8. Linear plant alpha=0.8, b=0.05, epsilon=0.1, y(0)=5, u(0)=0, lambda=0.15.
ExperimentConfig fig4_config(Fig4Controller which);

/// RKF45 at rel_tol 1e-10. f(y) = 3[1 + 2 sin(exp(y))] y, b=1, epsilon=0.1, lambda=0.5,
/// kappa(z) = [exp(z^2/10) - 1] cos(z), y(0)=5, u(0)=0.
ExperimentConfig fig5_config();

struct Overrides {
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<Method> method;
  std::optional<double> epsilon;
  std::optional<double> y0;
  std::optional<double> u0;
};

void apply(const Overrides& o, ExperimentConfig& cfg);

struct RunResult {
  ExperimentConfig config;
  Trajectory trajectory;
  Verdict verdict;
  double seconds = 0.0;
};

RunResult run_experiment(const ExperimentConfig& cfg);

struct Expectation {
  std::string label;
  VerdictClass expected;
  RunResult result;

  bool met() const;
  std::string summary() const;
};

/// One line: `head`, termination, final |y|, tail maximum, steps, wall time.
std::string run_summary(const std::string& head, const RunResult& result);

/// NG, nPI and nPI-N runs; expected Diverged, Diverged, Converged.
std::vector<Expectation> reproduce_fig4(const Overrides& o = {});

Expectation reproduce_fig5(const Overrides& o = {});

struct SweepCell {
  double epsilon = 0.0;
  double lambda = 0.0;
  std::string verdict;  // VerdictClass name, or "Invalid" for an unusable cell
  double tail_max_abs_y = 0.0;
  double margin = 0.0;
};

/// One run per (epsilon, lambda) pair, row-major in epsilon. Cells run on
/// `threads` workers (0: hardware concurrency); output order is fixed.
std::vector<SweepCell> run_sweep(const ExperimentConfig& base, const std::vector<double>& epsilons,
                                 const std::vector<double>& lambdas, unsigned threads = 0);

std::string sweep_csv(const std::vector<SweepCell>& cells);

/// "a,b,c" or "start:stop:count" (inclusive linspace).
std::vector<double> parse_grid(const std::string& text);

std::string fig4_svg(const std::vector<Expectation>& runs);
std::string fig5_svg(const Expectation& run);
std::string trajectory_svg(const std::string& title, const Trajectory& traj);

}  // namespace npi
