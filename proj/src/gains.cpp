#include "npi/gains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace npi {

namespace {

constexpr double kMax = std::numeric_limits<double>::max();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

GainValue saturate(double sign) { return {std::copysign(kMax, sign), true}; }

// Signed comparison of sign * exp(log_abs) values without leaving log-space.
bool strictly_less(const GrowthSample& a, const GrowthSample& b) {
  if (a.sign != b.sign) return a.sign < b.sign;
  if (a.sign == 0) return false;
  return a.sign > 0 ? a.log_abs < b.log_abs : a.log_abs > b.log_abs;
}

}  // namespace

void validate(const BetaSpec& beta) {
  std::visit(Overloaded{
                 [](const PowerBeta& b) {
                   if (!(b.p > 0.0) || !std::isfinite(b.p))
                     throw std::invalid_argument("power beta needs p > 0");
                 },
                 [](const ExpQuadraticBeta& b) {
                   if (!(b.c1 > 0.0) || !(b.c2 > 0.0) || !std::isfinite(b.c1) ||
                       !std::isfinite(b.c2))
                     throw std::invalid_argument("exp-quadratic beta needs c1 > 0 and c2 > 0");
                 },
                 [](const IdentityBeta&) {},
             },
             beta);
}

void validate(const GainSpec& gain) {
  std::visit(Overloaded{
                 [](const BetaCosGain& g) { validate(g.beta); },
                 [](const TabulatedGain& g) {
                   if (g.z.size() < 2 || g.z.size() != g.value.size())
                     throw std::invalid_argument("tabulated gain needs >= 2 (z, value) samples");
                   for (std::size_t i = 1; i < g.z.size(); ++i)
                     if (!(g.z[i] > g.z[i - 1]))
                       throw std::invalid_argument("tabulated gain z samples must increase");
                 },
             },
             gain);
}

std::string describe(const BetaSpec& beta) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const PowerBeta& b) { os << "power(p=" << b.p << ")"; },
                 [&](const ExpQuadraticBeta& b) {
                   os << "expquad(c1=" << b.c1 << ", c2=" << b.c2 << ")";
                 },
                 [&](const IdentityBeta&) { os << "identity"; },
             },
             beta);
  return os.str();
}

std::string describe(const GainSpec& gain) {
  return std::visit(Overloaded{
                        [](const BetaCosGain& g) { return describe(g.beta) + " * cos(z)"; },
                        [](const TabulatedGain& g) {
                          return "tabulated(" + std::to_string(g.z.size()) + " samples)";
                        },
                    },
                    gain);
}

GainValue eval_beta(const BetaSpec& beta, double z) {
  return std::visit(
      Overloaded{
          [z](const PowerBeta& b) -> GainValue {
            if (z < 0.0) throw std::domain_error("power beta is defined for z >= 0 only");
            const double v = std::pow(z, b.p);
            if (!std::isfinite(v)) return saturate(1.0);
            return {v, false};
          },
          [z](const ExpQuadraticBeta& b) -> GainValue {
            const double v = b.c1 * std::expm1(b.c2 * z * z);
            if (!std::isfinite(v)) return saturate(1.0);
            return {v, false};
          },
          [z](const IdentityBeta&) -> GainValue { return {z, false}; },
      },
      beta);
}

double log_beta(const BetaSpec& beta, double z) {
  if (!(z > 0.0)) throw std::domain_error("log_beta needs z > 0");
  return std::visit(Overloaded{
                        [z](const PowerBeta& b) { return b.p * std::log(z); },
                        [z](const ExpQuadraticBeta& b) {
                          const double a = b.c2 * z * z;
                          // log(expm1(a)) = a + log1p(-exp(-a)), stable for large a
                          const double log_em1 = a > 1.0 ? a + std::log1p(-std::exp(-a))
                                                         : std::log(std::expm1(a));
                          return std::log(b.c1) + log_em1;
                        },
                        [z](const IdentityBeta&) { return std::log(z); },
                    },
                    beta);
}

GainValue eval_kappa(const GainSpec& gain, double z) {
  return std::visit(
      Overloaded{
          [z](const BetaCosGain& g) -> GainValue {
            const GainValue b = eval_beta(g.beta, z);
            const double c = std::cos(z);
            if (b.overflow) {
              if (c == 0.0) return {0.0, true};
              return saturate(c);
            }
            return {b.value * c, false};
          },
          [z](const TabulatedGain& g) -> GainValue {
            if (z < g.z.front() || z > g.z.back())
              throw std::domain_error("z outside tabulated gain range");
            auto it = std::upper_bound(g.z.begin(), g.z.end(), z);
            if (it == g.z.end()) return {g.value.back(), false};
            const auto hi = static_cast<std::size_t>(it - g.z.begin());
            const std::size_t lo = hi - 1;
            const double w = (z - g.z[lo]) / (g.z[hi] - g.z[lo]);
            return {g.value[lo] + w * (g.value[hi] - g.value[lo]), false};
          },
      },
      gain);
}

std::string to_string(NussbaumClass c) {
  switch (c) {
    case NussbaumClass::LikelyNussbaum:
      return "LikelyNussbaum";
    case NussbaumClass::NotNussbaumWitness:
      return "NotNussbaumWitness";
    case NussbaumClass::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

namespace {

struct DirectionScan {
  DirectionalAverages averages;
  bool overflow = false;
  double overflow_at = 0.0;
};

// Averages (1/r) * integral_0^r n(sign * t) dt at the even Simpson nodes of
// [0, zeta_max], reduced to running extrema per window.
DirectionScan scan_direction(const std::function<double(double)>& n, double sign,
                             double zeta_max, int intervals, int windows) {
  DirectionScan scan;
  const double h = zeta_max / intervals;
  const int nodes = intervals / 2;  // Simpson panels

  double integral = 0.0;
  double f_left = n(0.0);
  double run_sup = -std::numeric_limits<double>::infinity();
  double run_inf = std::numeric_limits<double>::infinity();
  int next_window = 0;

  if (!std::isfinite(f_left)) {
    scan.overflow = true;
    return scan;
  }

  for (int k = 1; k <= nodes; ++k) {
    const double t_mid = (2 * k - 1) * h;
    const double t_right = 2 * k * h;
    const double f_mid = n(sign * t_mid);
    const double f_right = n(sign * t_right);
    integral += h / 3.0 * (f_left + 4.0 * f_mid + f_right);
    f_left = f_right;
    const double avg = integral / t_right;
    if (!std::isfinite(f_mid) || !std::isfinite(f_right) || !std::isfinite(avg)) {
      scan.overflow = true;
      scan.overflow_at = t_right;
      if (k > 1) {  // partial window up to the last finite node
        scan.averages.window_end.push_back(t_right - 2 * h);
        scan.averages.running_sup.push_back(run_sup);
        scan.averages.running_inf.push_back(run_inf);
      }
      return scan;
    }
    run_sup = std::max(run_sup, avg);
    run_inf = std::min(run_inf, avg);

    // window w ends at node ceil((w + 1) * nodes / windows)
    while (next_window < windows &&
           k == (static_cast<long long>(next_window + 1) * nodes + windows - 1) / windows) {
      scan.averages.window_end.push_back(t_right);
      scan.averages.running_sup.push_back(run_sup);
      scan.averages.running_inf.push_back(run_inf);
      ++next_window;
    }
  }
  return scan;
}

enum class DirectionTrend { Growing, Bounded, Unclear };

DirectionTrend trend(const DirectionalAverages& a, double gate) {
  if (a.running_sup.empty()) return DirectionTrend::Unclear;
  const double sup = a.running_sup.back();
  const double inf = a.running_inf.back();
  if (sup > gate && inf < -gate) return DirectionTrend::Growing;
  if (std::max(std::abs(sup), std::abs(inf)) > gate) return DirectionTrend::Unclear;
  const std::size_t mid = a.running_sup.size() / 2 - (a.running_sup.size() > 1 ? 1 : 0);
  const double sup_growth = sup - a.running_sup[mid];
  const double inf_growth = a.running_inf[mid] - inf;
  const bool sup_flat = sup_growth <= 0.05 * std::abs(sup) + 1e-3;
  const bool inf_flat = inf_growth <= 0.05 * std::abs(inf) + 1e-3;
  return sup_flat && inf_flat ? DirectionTrend::Bounded : DirectionTrend::Unclear;
}

double extremum_bound(const DirectionalAverages& a) {
  return std::max(std::abs(a.running_sup.back()), std::abs(a.running_inf.back()));
}

}  // namespace

NussbaumVerdict nussbaum_index(const std::function<double(double)>& n, double zeta_max,
                               int n_grid, const NussbaumOptions& options) {
  if (!(zeta_max > 0.0) || !std::isfinite(zeta_max))
    throw std::invalid_argument("nussbaum_index needs zeta_max > 0");
  if (n_grid < 100) throw std::invalid_argument("nussbaum_index needs n_grid >= 100");
  if (options.windows < 2) throw std::invalid_argument("nussbaum_index needs >= 2 windows");

  const int intervals = n_grid + (n_grid % 2);
  NussbaumVerdict verdict;
  DirectionScan pos = scan_direction(n, 1.0, zeta_max, intervals, options.windows);
  DirectionScan neg = scan_direction(n, -1.0, zeta_max, intervals, options.windows);
  verdict.positive = std::move(pos.averages);
  verdict.negative = std::move(neg.averages);

  const double gate = options.growth_gate;
  const DirectionTrend tp = trend(verdict.positive, gate);
  const DirectionTrend tn = trend(verdict.negative, gate);

  if (pos.overflow || neg.overflow) {
    std::ostringstream os;
    const bool grown = tp == DirectionTrend::Growing && tn == DirectionTrend::Growing;
    if (grown) os << "running averages crossed +-" << gate << " in both directions before ";
    os << "quadrature overflow";
    if (pos.overflow) os << " at zeta=+" << pos.overflow_at;
    if (neg.overflow) os << " at zeta=-" << neg.overflow_at;
    verdict.classification = grown ? NussbaumClass::LikelyNussbaum : NussbaumClass::Inconclusive;
    verdict.diagnostic = os.str();
    return verdict;
  }

  if (tp == DirectionTrend::Growing && tn == DirectionTrend::Growing) {
    verdict.classification = NussbaumClass::LikelyNussbaum;
    std::ostringstream os;
    os << "running averages crossed +-" << gate << " in both directions (heuristic, not a proof)";
    verdict.diagnostic = os.str();
  } else if (tp == DirectionTrend::Bounded || tn == DirectionTrend::Bounded) {
    double bound = 0.0;
    if (tp == DirectionTrend::Bounded) bound = std::max(bound, extremum_bound(verdict.positive));
    if (tn == DirectionTrend::Bounded) bound = std::max(bound, extremum_bound(verdict.negative));
    verdict.classification = NussbaumClass::NotNussbaumWitness;
    verdict.witness_bound = bound;
    verdict.diagnostic = "running average stalled below the growth gate";
  } else {
    verdict.classification = NussbaumClass::Inconclusive;
    std::ostringstream os;
    os << "running averages still growing but below the growth gate " << gate;
    verdict.diagnostic = os.str();
  }
  return verdict;
}

NussbaumVerdict nussbaum_index(const GainSpec& gain, double zeta_max, int n_grid,
                               const NussbaumOptions& options) {
  validate(gain);
  bool saturated = false;
  auto n = [&](double s) {
    const GainValue v = eval_kappa(gain, s);
    if (v.overflow) {
      saturated = true;
      return std::numeric_limits<double>::infinity();
    }
    return v.value;
  };
  NussbaumVerdict verdict = nussbaum_index(n, zeta_max, n_grid, options);
  if (saturated) verdict.diagnostic += " (gain overflow)";
  return verdict;
}

std::function<double(double)> two_sided(const GainSpec& gain) {
  validate(gain);
  const bool even_power = std::holds_alternative<BetaCosGain>(gain) &&
                          std::holds_alternative<PowerBeta>(std::get<BetaCosGain>(gain).beta);
  return [gain, even_power](double s) {
    const GainValue v = eval_kappa(gain, even_power ? std::abs(s) : s);
    if (v.overflow) return std::numeric_limits<double>::infinity();
    return v.value;
  };
}

double GrowthSample::value() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_abs);
}

std::vector<double> geometric_grid(double z_min, double z_max, int count) {
  if (!(z_min > 0.0) || !(z_max > z_min) || count < 2)
    throw std::invalid_argument("geometric_grid needs 0 < z_min < z_max and count >= 2");
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double ratio = std::log(z_max / z_min) / (count - 1);
  for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = z_min * std::exp(ratio * i);
  grid.back() = z_max;
  return grid;
}

std::vector<double> default_growth_grid() { return geometric_grid(1.0, 1e6, 600); }

BetaGrowthResult check_beta_growth(const BetaSpec& beta, double c, double delta,
                                   const std::vector<double>& z_grid,
                                   const BetaGrowthOptions& options) {
  validate(beta);
  if (!(c > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("check_beta_growth needs c > 0 and delta > 0");
  if (z_grid.size() < 4) throw std::invalid_argument("check_beta_growth needs >= 4 grid points");
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    if (!(z_grid[i] > 0.0)) throw std::invalid_argument("z grid must be positive");
    if (i > 0 && !(z_grid[i] > z_grid[i - 1]))
      throw std::invalid_argument("z grid must be strictly increasing");
  }

  BetaGrowthResult result;
  result.values.reserve(z_grid.size());
  const double log_c = std::log(c);
  for (const double z : z_grid) {
    // g = A - B with A = beta(z + delta) / z, B = c beta(z)
    const double log_a = log_beta(beta, z + delta) - std::log(z);
    const double log_b = log_c + log_beta(beta, z);
    GrowthSample s;
    s.z = z;
    if (log_a == log_b) {
      s.sign = 0;
      s.log_abs = -std::numeric_limits<double>::infinity();
    } else {
      const double hi = std::max(log_a, log_b);
      const double gap = std::abs(log_a - log_b);
      s.sign = log_a > log_b ? 1 : -1;
      s.log_abs = hi + std::log1p(-std::exp(-gap));
    }
    result.values.push_back(s);
  }

  const std::size_t n = result.values.size();
  const auto tail_start = static_cast<std::size_t>(
      std::floor((1.0 - options.tail_fraction) * static_cast<double>(n - 1)));
  bool increasing = true;
  for (std::size_t i = tail_start; i + 1 < n; ++i) {
    if (!strictly_less(result.values[i], result.values[i + 1])) {
      increasing = false;
      break;
    }
  }
  const GrowthSample& last = result.values.back();
  const bool above_gate = last.sign > 0 && last.log_abs > std::log(options.divergence_gate);
  result.passes = increasing && above_gate;
  return result;
}

}  // namespace npi
