#include "npi/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace npi {

CertificateParams certificate_params(const PlantSpec& plant, const NpiController& ctrl) {
  CertificateParams p;
  p.epsilon = plant.epsilon;
  p.lambda = ctrl.lambda;
  p.alpha1 = plant.sector.declared_alpha1;
  p.alpha2 = plant.sector.declared_alpha2;
  p.b = plant.b;
  return p;
}

ConditionI check_condition_i(double epsilon, double lambda, double alpha2) {
  if (!(epsilon > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("condition (i) needs epsilon > 0 and lambda > 0");
  ConditionI c;
  c.margin = 1.0 - epsilon * (lambda + alpha2);
  c.holds = c.margin > 0.0;
  return c;
}

double ell_threshold(const CertificateParams& p) {
  const double margin = 1.0 - p.epsilon * (p.lambda + p.alpha2);
  if (!(margin > 0.0))
    throw std::domain_error("ell threshold undefined: epsilon (lambda + alpha2) >= 1");
  const double lead = (p.alpha2 + p.lambda) / p.b;
  const double one_minus = 1.0 - p.epsilon * p.alpha1;
  const double second = one_minus * one_minus / (4.0 * p.lambda * margin);
  return lead * lead * std::max(p.epsilon, second);
}

double s_value(double u, double y, const CertificateParams& p) {
  return 0.5 * p.epsilon * u * u + p.epsilon * (p.alpha2 + p.lambda) / p.b * u * y +
         0.5 * p.ell * y * y;
}

double lambda_matrix_min_eig(double y_alpha, const CertificateParams& p) {
  const double a = 1.0 - p.epsilon * (p.lambda + p.alpha2);
  const double c = (p.lambda + p.alpha2) * (1.0 - p.epsilon * y_alpha) / (2.0 * p.b);
  const double d = p.lambda * p.ell;
  const double mean = 0.5 * (a + d);
  const double half_gap = 0.5 * (a - d);
  return mean - std::hypot(half_gap, c);
}

bool lambda_matrix_pd_closed_form(const CertificateParams& p) {
  const double a = 1.0 - p.epsilon * (p.lambda + p.alpha2);
  if (!(a > 0.0) || !(p.lambda * p.ell > 0.0)) return false;
  std::array<double, 3> probes{p.alpha1, p.alpha2, p.alpha1};
  std::size_t count = 2;
  const double vertex = 1.0 / p.epsilon;
  if (vertex > p.alpha1 && vertex < p.alpha2) probes[count++] = vertex;
  for (std::size_t i = 0; i < count; ++i) {
    const double off = (p.lambda + p.alpha2) * (1.0 - p.epsilon * probes[i]) / p.b;
    if (!(4.0 * a * p.lambda * p.ell > off * off)) return false;
  }
  return true;
}

bool s_nonneg_closed_form(const CertificateParams& p) {
  if (!(p.epsilon > 0.0) || p.ell < 0.0) return false;
  const double cross = p.epsilon * (p.alpha2 + p.lambda) / p.b;
  return p.epsilon * p.ell >= cross * cross;
}

bool CertificateReport::theorem_passes() const {
  return condition_i.holds && !short_circuited && s_nonneg.ok && lambda_pd.ok &&
         beta_growth.passes;
}

bool CertificateReport::certified() const { return theorem_passes() || corollary.passes; }

namespace {

BetaGrowthSummary beta_growth_summary(const GainSpec& gain) {
  BetaGrowthSummary summary;
  const auto* bc = std::get_if<BetaCosGain>(&gain);
  if (!bc) return summary;
  summary.applicable = true;
  const std::vector<double> grid = default_growth_grid();
  for (const double c : {0.1, 1.0, 10.0}) {
    for (const double delta : {0.01, 0.1, 1.0, 5.0}) {
      ++summary.cases;
      if (!check_beta_growth(bc->beta, c, delta, grid).passes) {
        if (summary.failures++ == 0) {
          std::ostringstream os;
          os << "c=" << c << ", delta=" << delta;
          summary.first_failure = os.str();
        }
      }
    }
  }
  summary.passes = summary.failures == 0;
  return summary;
}

NussbaumVerdict two_sided_nussbaum(const GainSpec& gain, const CertifyOptions& options) {
  if (const auto* tab = std::get_if<TabulatedGain>(&gain)) {
    const double reach = std::min(-tab->z.front(), tab->z.back());
    if (!(reach > 0.0)) {
      NussbaumVerdict v;
      v.diagnostic = "tabulated gain does not cover both signs of z";
      return v;
    }
    return nussbaum_index(gain, reach, options.nf_n_grid);
  }
  return nussbaum_index(two_sided(gain), options.nf_zeta_max, options.nf_n_grid);
}

}  // namespace

CertificateReport certify(const PlantSpec& plant, const NpiController& ctrl, double ell_factor,
                          const CertifyOptions& options) {
  validate(plant);
  validate(ControllerSpec{ctrl});
  if (!(ell_factor > 1.0)) throw std::invalid_argument("ell_factor must be > 1");

  CertificateReport r;
  r.params = certificate_params(plant, ctrl);
  r.plant_description = describe(plant.sector.kind);
  r.controller_description = describe(ControllerSpec{ctrl});
  r.condition_i = check_condition_i(plant.epsilon, ctrl.lambda, r.params.alpha2);

  if (const auto* lin = std::get_if<LinearSector>(&plant.sector.kind)) {
    r.corollary.applicable = true;
    r.corollary.condition_holds = plant.epsilon * (ctrl.lambda + lin->alpha) < 1.0;
  }

  if (!r.condition_i.holds) {
    r.short_circuited = true;
    return r;
  }

  r.ell_threshold = ell_threshold(r.params);
  r.params.ell = ell_factor * r.ell_threshold;
  const CertificateParams& p = r.params;

  // S >= 0 on a grid, plus the exact quadratic-form test.
  r.s_nonneg.worst_s = std::numeric_limits<double>::infinity();
  const int ns = std::max(2, options.s_grid);
  for (int i = 0; i < ns; ++i) {
    const double u = -options.s_extent + 2.0 * options.s_extent * i / (ns - 1);
    for (int j = 0; j < ns; ++j) {
      const double y = -options.s_extent + 2.0 * options.s_extent * j / (ns - 1);
      const double s = s_value(u, y, p);
      if (s < r.s_nonneg.worst_s) {
        r.s_nonneg.worst_s = s;
        r.s_nonneg.worst_u = u;
        r.s_nonneg.worst_y = y;
      }
    }
  }
  r.s_nonneg.closed_form_ok = s_nonneg_closed_form(p);
  r.s_nonneg.ok = r.s_nonneg.worst_s >= 0.0 && r.s_nonneg.closed_form_ok;

  // Lambda > 0 over the declared alpha range.
  r.lambda_pd.min_eigenvalue = std::numeric_limits<double>::infinity();
  const int na = std::max(2, options.alpha_grid);
  for (int i = 0; i < na; ++i) {
    const double alpha =
        i == na - 1 ? p.alpha2 : p.alpha1 + (p.alpha2 - p.alpha1) * i / (na - 1);
    const double eig = lambda_matrix_min_eig(alpha, p);
    if (eig < r.lambda_pd.min_eigenvalue) {
      r.lambda_pd.min_eigenvalue = eig;
      r.lambda_pd.worst_alpha = alpha;
    }
  }
  r.lambda_pd.closed_form_ok = lambda_matrix_pd_closed_form(p);
  r.lambda_pd.ok = r.lambda_pd.min_eigenvalue > 0.0 && r.lambda_pd.closed_form_ok;

  r.beta_growth = beta_growth_summary(ctrl.gain);

  if (r.corollary.applicable) {
    r.corollary.nussbaum = two_sided_nussbaum(ctrl.gain, options).classification;
    const bool nf = r.corollary.nussbaum == NussbaumClass::LikelyNussbaum || r.beta_growth.passes;
    r.corollary.passes = r.corollary.condition_holds && nf;
  }
  return r;
}

namespace {

const char* yes_no(bool b) { return b ? "pass" : "FAIL"; }

}  // namespace

std::string format_report_text(const CertificateReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "plant:      " << r.plant_description << ", b=" << r.params.b
     << ", epsilon=" << r.params.epsilon << ", sector=[" << r.params.alpha1 << ", "
     << r.params.alpha2 << "]\n";
  os << "controller: " << r.controller_description << "\n\n";
  os << "condition (i)  eps*(lambda+alpha2) < 1   " << yes_no(r.condition_i.holds)
     << "  margin=" << r.condition_i.margin << "\n";
  if (r.short_circuited) {
    os << "remaining theorem checks skipped: condition (i) fails\n";
  } else {
    os << "ell threshold                           " << r.ell_threshold
       << "  (ell used: " << r.params.ell << ")\n";
    os << "S(u,y) >= 0                             " << yes_no(r.s_nonneg.ok)
       << "  grid min=" << r.s_nonneg.worst_s << " at (u=" << r.s_nonneg.worst_u
       << ", y=" << r.s_nonneg.worst_y << "), closed form " << yes_no(r.s_nonneg.closed_form_ok)
       << "\n";
    os << "Lambda(y) positive definite             " << yes_no(r.lambda_pd.ok)
       << "  min eig=" << r.lambda_pd.min_eigenvalue << " at alpha=" << r.lambda_pd.worst_alpha
       << ", closed form " << yes_no(r.lambda_pd.closed_form_ok) << "\n";
    os << "beta growth property                    ";
    if (!r.beta_growth.applicable)
      os << "n/a (tabulated gain)\n";
    else
      os << yes_no(r.beta_growth.passes) << "  " << (r.beta_growth.cases - r.beta_growth.failures)
         << "/" << r.beta_growth.cases << " (c, delta) cases"
         << (r.beta_growth.failures ? ", first failure " + r.beta_growth.first_failure : "")
         << "\n";
  }
  if (r.corollary.applicable) {
    os << "linear corollary                        " << yes_no(r.corollary.passes)
       << "  eps*(lambda+alpha)<1: " << yes_no(r.corollary.condition_holds)
       << ", gain: " << to_string(r.corollary.nussbaum) << "\n";
  }
  os << "\ntheorem hypotheses: " << yes_no(r.theorem_passes())
     << "\ncertified:          " << (r.certified() ? "yes" : "no") << "\n";
  return os.str();
}

std::string format_report_kv(const CertificateReport& r) {
  std::ostringstream os;
  os.precision(17);
  auto b = [](bool v) { return v ? "true" : "false"; };
  os << "params.epsilon = " << r.params.epsilon << "\n";
  os << "params.lambda = " << r.params.lambda << "\n";
  os << "params.alpha1 = " << r.params.alpha1 << "\n";
  os << "params.alpha2 = " << r.params.alpha2 << "\n";
  os << "params.b = " << r.params.b << "\n";
  os << "condition_i.holds = " << b(r.condition_i.holds) << "\n";
  os << "condition_i.margin = " << r.condition_i.margin << "\n";
  os << "short_circuited = " << b(r.short_circuited) << "\n";
  if (!r.short_circuited) {
    os << "ell_threshold = " << r.ell_threshold << "\n";
    os << "ell = " << r.params.ell << "\n";
    os << "s_nonneg.ok = " << b(r.s_nonneg.ok) << "\n";
    os << "s_nonneg.worst_u = " << r.s_nonneg.worst_u << "\n";
    os << "s_nonneg.worst_y = " << r.s_nonneg.worst_y << "\n";
    os << "s_nonneg.worst_s = " << r.s_nonneg.worst_s << "\n";
    os << "lambda_pd.ok = " << b(r.lambda_pd.ok) << "\n";
    os << "lambda_pd.worst_alpha = " << r.lambda_pd.worst_alpha << "\n";
    os << "lambda_pd.min_eigenvalue = " << r.lambda_pd.min_eigenvalue << "\n";
    os << "beta_growth.applicable = " << b(r.beta_growth.applicable) << "\n";
    os << "beta_growth.passes = " << b(r.beta_growth.passes) << "\n";
    os << "beta_growth.failures = " << r.beta_growth.failures << "\n";
  }
  os << "corollary.applicable = " << b(r.corollary.applicable) << "\n";
  if (r.corollary.applicable) {
    os << "corollary.condition_holds = " << b(r.corollary.condition_holds) << "\n";
    os << "corollary.nussbaum = " << to_string(r.corollary.nussbaum) << "\n";
    os << "corollary.passes = " << b(r.corollary.passes) << "\n";
  }
  os << "theorem_passes = " << b(r.theorem_passes()) << "\n";
  os << "certified = " << b(r.certified()) << "\n";
  return os.str();
}

}  // namespace npi
