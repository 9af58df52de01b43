#include "npi/controller.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace npi {

void validate(const ControllerSpec& spec) {
  const double lambda = lambda_of(spec);
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("controller lambda must be > 0");
  if (const auto* npi = std::get_if<NpiController>(&spec)) validate(npi->gain);
}

std::string describe(const ControllerSpec& spec) {
  std::ostringstream os;
  if (const auto* npi = std::get_if<NpiController>(&spec)) {
    os << "nPI(lambda=" << npi->lambda << ", kappa=" << describe(npi->gain) << ")";
  } else {
    os << "NG(lambda=" << std::get<NgController>(spec).lambda << ", kappa=zeta^2 cos(zeta))";
  }
  return os.str();
}

double lambda_of(const ControllerSpec& spec) {
  return std::visit([](const auto& c) { return c.lambda; }, spec);
}

double ng_gain(double zeta) { return zeta * zeta * std::cos(zeta); }

ControllerOutput controller_output(const ControllerSpec& spec, double q, double y) {
  if (const auto* npi = std::get_if<NpiController>(&spec)) {
    const double z = 0.5 * y * y + q;
    const GainValue k = eval_kappa(npi->gain, z);
    const double u_nom = k.value * y;
    return {u_nom, z, k.overflow || !std::isfinite(u_nom)};
  }
  const double u_nom = ng_gain(q) * y;
  return {u_nom, q, !std::isfinite(u_nom)};
}

double controller_rhs(const ControllerSpec& spec, double y) { return lambda_of(spec) * y * y; }

double z_dot_identity_check(const PlantSpec& plant, const NpiController& spec, double y, double u) {
  const double y_dot = eval_f(plant.sector, y) + plant.b * u;
  const double lhs = y * y_dot + spec.lambda * y * y;
  const double rhs = plant.b * y * u + (eval_alpha(plant.sector, y) + spec.lambda) * y * y;
  return std::abs(lhs - rhs);
}

}  // namespace npi
