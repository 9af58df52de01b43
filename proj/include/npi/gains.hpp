#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace npi {

/// beta(z) = z^p, defined for z >= 0 only.
struct PowerBeta {
  double p = 1.0;
};

/// beta(z) = c1 * (exp(c2 z^2) - 1).
struct ExpQuadraticBeta {
  double c1 = 1.0;
  double c2 = 1.0;
};

/// beta(z) = z.
struct IdentityBeta {};

using BetaSpec = std::variant<PowerBeta, ExpQuadraticBeta, IdentityBeta>;

/// kappa(z) = beta(z) cos(z).
struct BetaCosGain {
  BetaSpec beta;
};

/// Piecewise-linear gain through (z, value) samples; z strictly increasing.
struct TabulatedGain {
  std::vector<double> z;
  std::vector<double> value;
};

using GainSpec = std::variant<BetaCosGain, TabulatedGain>;

/// Result of a gain evaluation. On overflow `value` saturates at +-max
/// double and `overflow` is set; an infinity is never returned.
struct GainValue {
  double value = 0.0;
  bool overflow = false;
};

void validate(const BetaSpec& beta);
void validate(const GainSpec& gain);

std::string describe(const BetaSpec& beta);
std::string describe(const GainSpec& gain);

/// Throws std::domain_error for z < 0 with the Power family.
GainValue eval_beta(const BetaSpec& beta, double z);

/// Natural log of beta(z) for z > 0. Finite far past the point where
/// beta itself overflows a double.
double log_beta(const BetaSpec& beta, double z);

GainValue eval_kappa(const GainSpec& gain, double z);

// ---------------------------------------------------------------------------
// Nussbaum property estimator

enum class NussbaumClass { LikelyNussbaum, NotNussbaumWitness, Inconclusive };

std::string to_string(NussbaumClass c);

/// Running extrema of the average (1/zeta) * integral_0^zeta N(s) ds at the
/// end of each window. Entry k covers every grid point up to window_end[k].
struct DirectionalAverages {
  std::vector<double> window_end;  // |zeta| at the window end
  std::vector<double> running_sup;
  std::vector<double> running_inf;
};

struct NussbaumVerdict {
  DirectionalAverages positive;  // zeta -> +inf
  DirectionalAverages negative;  // zeta -> -inf
  NussbaumClass classification = NussbaumClass::Inconclusive;
  std::optional<double> witness_bound;
  std::string diagnostic;
};

struct NussbaumOptions {
  double growth_gate = 1e3;
  int windows = 20;
};

/// Heuristic verdict on the Nussbaum property from composite Simpson
/// quadrature on [-zeta_max, zeta_max]. Not a proof.
NussbaumVerdict nussbaum_index(const std::function<double(double)>& n, double zeta_max,
                               int n_grid, const NussbaumOptions& options = {});

NussbaumVerdict nussbaum_index(const GainSpec& gain, double zeta_max, int n_grid,
                               const NussbaumOptions& options = {});

/// The gain as a function on the whole real line, for two-sided Nussbaum
/// estimates: Power gains are extended evenly as |z|^p cos(z). Overflow maps
/// to +infinity so the estimator reports it.
std::function<double(double)> two_sided(const GainSpec& gain);

// ---------------------------------------------------------------------------
// Growth subclass: lim [beta(z + delta)/z - c beta(z)] = +inf

/// g(z) stored as sign * exp(log_abs); sign is 0 when g(z) == 0.
struct GrowthSample {
  double z = 0.0;
  int sign = 0;
  double log_abs = 0.0;

  double value() const;
};

struct BetaGrowthResult {
  bool passes = false;
  std::vector<GrowthSample> values;
};

struct BetaGrowthOptions {
  double divergence_gate = 1e6;
  double tail_fraction = 0.25;
};

/// Geometric grid on [z_min, z_max].
std::vector<double> geometric_grid(double z_min, double z_max, int count);

/// Default grid used by certification: 600 geometric points on [1, 1e6].
std::vector<double> default_growth_grid();

BetaGrowthResult check_beta_growth(const BetaSpec& beta, double c, double delta,
                                   const std::vector<double>& z_grid,
                                   const BetaGrowthOptions& options = {});

}  // namespace npi
