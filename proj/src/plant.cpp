#include "npi/plant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace npi {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kBoundTolerance = 1e-12;

double tabulated_f(const TabulatedSector& s, double y) {
  if (y < s.y.front() || y > s.y.back()) throw std::domain_error("y outside tabulated sector range");
  auto it = std::upper_bound(s.y.begin(), s.y.end(), y);
  if (it == s.y.end()) return s.f.back();
  const auto hi = static_cast<std::size_t>(it - s.y.begin());
  const std::size_t lo = hi - 1;
  const double w = (y - s.y[lo]) / (s.y[hi] - s.y[lo]);
  return s.f[lo] + w * (s.f[hi] - s.f[lo]);
}

}  // namespace

void validate(const SectorFn& sector) {
  if (!(sector.declared_alpha1 <= sector.declared_alpha2))
    throw std::invalid_argument("declared sector bounds need alpha1 <= alpha2");
  if (const auto* t = std::get_if<TabulatedSector>(&sector.kind)) {
    if (t->y.size() < 2 || t->y.size() != t->f.size())
      throw std::invalid_argument("tabulated sector needs >= 2 (y, f) samples");
    for (std::size_t i = 0; i < t->y.size(); ++i) {
      if (i > 0 && !(t->y[i] > t->y[i - 1]))
        throw std::invalid_argument("tabulated sector y samples must increase");
      if (t->y[i] == 0.0 && t->f[i] != 0.0)
        throw std::invalid_argument("invalid sector: f(0) must be 0");
    }
    if (t->y.front() <= 0.0 && t->y.back() >= 0.0 && !t->alpha_at_zero)
      throw std::invalid_argument("tabulated sector spanning y=0 needs an explicit alpha(0)");
  }
}

void validate(const PlantSpec& plant) {
  validate(plant.sector);
  if (plant.b == 0.0 || !std::isfinite(plant.b))
    throw std::invalid_argument("plant input gain b must be nonzero");
  if (!(plant.epsilon > 0.0) || !std::isfinite(plant.epsilon))
    throw std::invalid_argument("actuator time constant epsilon must be > 0");
}

std::string describe(const SectorKind& kind) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const LinearSector& s) { os << "linear(alpha=" << s.alpha << ")"; },
                 [&](const SinExpSector& s) {
                   os << "sinexp(a=" << s.a << ", b_amp=" << s.b_amp << ")";
                 },
                 [&](const TabulatedSector& s) { os << "tabulated(" << s.y.size() << " samples)"; },
             },
             kind);
  return os.str();
}

std::optional<std::pair<double, double>> analytic_sector_bounds(const SectorKind& kind) {
  if (const auto* l = std::get_if<LinearSector>(&kind)) return std::pair{l->alpha, l->alpha};
  if (const auto* s = std::get_if<SinExpSector>(&kind)) {
    const double lo = s->a * (1.0 - std::abs(s->b_amp));
    const double hi = s->a * (1.0 + std::abs(s->b_amp));
    return std::pair{std::min(lo, hi), std::max(lo, hi)};
  }
  return std::nullopt;
}

double eval_f(const SectorFn& sector, double y) {
  return std::visit(Overloaded{
                        [y](const LinearSector& s) { return s.alpha * y; },
                        [y](const SinExpSector& s) {
                          return s.a * (1.0 + s.b_amp * std::sin(std::exp(y))) * y;
                        },
                        [y](const TabulatedSector& s) { return tabulated_f(s, y); },
                    },
                    sector.kind);
}

double eval_alpha(const SectorFn& sector, double y) {
  return std::visit(Overloaded{
                        [](const LinearSector& s) { return s.alpha; },
                        [y](const SinExpSector& s) {
                          return s.a * (1.0 + s.b_amp * std::sin(std::exp(y)));
                        },
                        [y](const TabulatedSector& s) {
                          if (std::abs(y) < kSectorGuard) {
                            if (!s.alpha_at_zero)
                              throw std::domain_error("tabulated sector has no alpha(0)");
                            return *s.alpha_at_zero;
                          }
                          return tabulated_f(s, y) / y;
                        },
                    },
                    sector.kind);
}

SectorCheck verify_sector_bounds(const SectorFn& sector, double y_min, double y_max, int n) {
  validate(sector);
  if (!(y_min < y_max)) throw std::invalid_argument("verify_sector_bounds needs y_min < y_max");
  if (n < 2) throw std::invalid_argument("verify_sector_bounds needs n >= 2");
  SectorCheck check;
  const double step = (y_max - y_min) / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double y = i == n - 1 ? y_max : y_min + step * i;
    const double alpha = eval_alpha(sector, y);
    if (alpha < sector.declared_alpha1 - kBoundTolerance ||
        alpha > sector.declared_alpha2 + kBoundTolerance) {
      check.violations.push_back({y, alpha});
    }
  }
  check.ok = check.violations.empty();
  return check;
}

std::optional<PlantRates> plant_rhs(const PlantSpec& plant, double y, double u, double u_nom) {
  if (!std::isfinite(y) || !std::isfinite(u) || !std::isfinite(u_nom)) return std::nullopt;
  const double f = eval_f(plant.sector, y);
  if (plant.topology == Topology::Nominal) return PlantRates{f + plant.b * u_nom, 0.0};
  return PlantRates{f + plant.b * u, (u_nom - u) / plant.epsilon};
}

}  // namespace npi
