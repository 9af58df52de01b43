#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace npi {

/// f(y) = alpha * y.
struct LinearSector {
  double alpha = 0.0;
};

/// f(y) = a * (1 + b_amp * sin(exp(y))) * y.
struct SinExpSector {
  double a = 0.0;
  double b_amp = 0.0;
};

/// Piecewise-linear f through (y, f) samples. Where the samples straddle
/// zero, alpha(0) must be given explicitly.
struct TabulatedSector {
  std::vector<double> y;
  std::vector<double> f;
  std::optional<double> alpha_at_zero;
};

using SectorKind = std::variant<LinearSector, SinExpSector, TabulatedSector>;

struct SectorFn {
  SectorKind kind;
  double declared_alpha1 = 0.0;
  double declared_alpha2 = 0.0;
};

enum class Topology { Nominal, ActuatorPerturbed };

struct PlantSpec {
  SectorFn sector;
  double b = 1.0;        // input gain, nonzero
  double epsilon = 0.1;  // actuator time constant [s]
  Topology topology = Topology::ActuatorPerturbed;
};

/// |y| below this uses the analytic alpha(0) instead of f(y)/y.
inline constexpr double kSectorGuard = 1e-9;

void validate(const SectorFn& sector);
void validate(const PlantSpec& plant);

std::string describe(const SectorKind& kind);

/// Tight analytic sector bounds where they exist (Linear, SinExp).
std::optional<std::pair<double, double>> analytic_sector_bounds(const SectorKind& kind);

double eval_f(const SectorFn& sector, double y);

/// alpha(y) = f(y)/y, with the analytic limit inside the guard band.
double eval_alpha(const SectorFn& sector, double y);

struct SectorViolation {
  double y = 0.0;
  double alpha = 0.0;
};

struct SectorCheck {
  bool ok = true;
  std::vector<SectorViolation> violations;
};

/// Samples alpha on n uniform points of [y_min, y_max] against the declared
/// bounds with tolerance 1e-12.
SectorCheck verify_sector_bounds(const SectorFn& sector, double y_min, double y_max, int n);

struct PlantRates {
  double dy = 0.0;
  double du = 0.0;  // zero for the nominal topology
};

/// Nominal: dy = f(y) + b u_nom. Actuator-perturbed: dy = f(y) + b u and
/// du = (u_nom - u) / epsilon. Empty on non-finite input.
std::optional<PlantRates> plant_rhs(const PlantSpec& plant, double y, double u, double u_nom);

}  // namespace npi
