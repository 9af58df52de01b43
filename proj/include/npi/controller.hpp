#pragma once

#include <string>
#include <variant>

#include "npi/gains.hpp"
#include "npi/plant.hpp"

namespace npi {

/// Nonlinear PI: u_nom = kappa(z) y with z = y^2/2 + q, dq/dt = lambda y^2.
struct NpiController {
  double lambda = 0.5;
  GainSpec gain;
};

/// Nussbaum-gain law: u_nom = zeta^2 cos(zeta) y, dzeta/dt = lambda y^2.
/// The controller state q holds zeta.
struct NgController {
  double lambda = 0.15;
};

using ControllerSpec = std::variant<NpiController, NgController>;

void validate(const ControllerSpec& spec);
std::string describe(const ControllerSpec& spec);
double lambda_of(const ControllerSpec& spec);

/// The fixed NG gain zeta^2 cos(zeta).
double ng_gain(double zeta);

struct ControllerOutput {
  double u_nom = 0.0;
  double z = 0.0;  // z for NPI, zeta for NG
  bool overflow = false;
};

ControllerOutput controller_output(const ControllerSpec& spec, double q, double y);

/// dq/dt = lambda y^2 for both controller kinds.
double controller_rhs(const ControllerSpec& spec, double y);

/// |(y dy/dt + lambda y^2) - (b y u + (alpha(y) + lambda) y^2)| with
/// dy/dt = f(y) + b u. Zero up to rounding for any consistent input.
double z_dot_identity_check(const PlantSpec& plant, const NpiController& spec, double y, double u);

}  // namespace npi
