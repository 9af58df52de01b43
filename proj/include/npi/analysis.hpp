#pragma once

#include <optional>
#include <string>

#include "npi/controller.hpp"
#include "npi/gains.hpp"
#include "npi/plant.hpp"

namespace npi {

struct CertificateParams {
  double epsilon = 0.0;
  double lambda = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double b = 1.0;
  double ell = 1.0;
};

/// Parameters read off a plant and controller, with ell left at 1; set ell separately.
CertificateParams certificate_params(const PlantSpec& plant, const NpiController& ctrl);

struct ConditionI {
  bool holds = false;
  double margin = 0.0;  // 1 - epsilon (lambda + alpha2)
};

ConditionI check_condition_i(double epsilon, double lambda, double alpha2);

/// ((alpha2 + lambda) / b)^2 * max{epsilon, (1 - epsilon alpha1)^2 /
/// (4 lambda (1 - epsilon (lambda + alpha2)))}. Ignores params.ell.
/// Throws std::domain_error when 1 - epsilon (lambda + alpha2) <= 0.
double ell_threshold(const CertificateParams& params);

/// S(u, y) = (eps/2) u^2 + (eps (alpha2 + lambda) / b) u y + (ell/2) y^2.
double s_value(double u, double y, const CertificateParams& params);

/// Smallest eigenvalue of the 2x2 dissipation matrix at alpha(y) = y_alpha.
double lambda_matrix_min_eig(double y_alpha, const CertificateParams& params);

/// Exact positive-definiteness test of the dissipation matrix over
/// alpha in [alpha1, alpha2]: the determinant is quadratic in alpha, so the
/// endpoints and the vertex alpha = 1/epsilon decide it.
bool lambda_matrix_pd_closed_form(const CertificateParams& params);

/// Exact test that S is positive semidefinite as a quadratic form.
bool s_nonneg_closed_form(const CertificateParams& params);

struct SNonneg {
  bool ok = false;
  double worst_u = 0.0;
  double worst_y = 0.0;
  double worst_s = 0.0;
  bool closed_form_ok = false;
};

struct LambdaPd {
  bool ok = false;
  double worst_alpha = 0.0;
  double min_eigenvalue = 0.0;
  bool closed_form_ok = false;
};

struct BetaGrowthSummary {
  bool applicable = false;  // false for tabulated gains
  bool passes = false;
  int cases = 0;
  int failures = 0;
  std::string first_failure;
};

struct CorollaryCheck {
  bool applicable = false;  // linear plant only
  bool condition_holds = false;
  NussbaumClass nussbaum = NussbaumClass::Inconclusive;
  bool passes = false;
};

struct CertificateReport {
  CertificateParams params;
  ConditionI condition_i;
  bool short_circuited = false;  // condition (i) failed; nothing else evaluated
  double ell_threshold = 0.0;
  SNonneg s_nonneg;
  LambdaPd lambda_pd;
  BetaGrowthSummary beta_growth;
  CorollaryCheck corollary;
  std::string plant_description;
  std::string controller_description;

  /// Condition (i), S >= 0, Lambda > 0 and the growth property all hold.
  bool theorem_passes() const;
  /// Theorem route or, for linear plants, the corollary route.
  bool certified() const;
};

struct CertifyOptions {
  int s_grid = 201;         // points per axis on [-100, 100]^2
  double s_extent = 100.0;
  int alpha_grid = 1000;
  double nf_zeta_max = 5000.0;
  int nf_n_grid = 1000000;
};

/// Theorem-hypothesis checks with ell = ell_factor * ell_threshold.
CertificateReport certify(const PlantSpec& plant, const NpiController& ctrl,
                          double ell_factor = 1.01, const CertifyOptions& options = {});

std::string format_report_text(const CertificateReport& report);
std::string format_report_kv(const CertificateReport& report);

}  // namespace npi
