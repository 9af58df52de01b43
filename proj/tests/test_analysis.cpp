#include <catch_amalgamated.hpp>

#include <cmath>

#include "npi/analysis.hpp"

using namespace npi;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

CertificateParams fig5_params(double ell = 1.0) { return {0.1, 0.5, -3.0, 9.0, 1.0, ell}; }
CertificateParams fig4_params(double ell = 1.0) { return {0.1, 0.15, 0.8, 0.8, 0.05, ell}; }

const PlantSpec kFig5Plant{SectorFn{SinExpSector{3.0, 2.0}, -3.0, 9.0}, 1.0, 0.1,
                           Topology::ActuatorPerturbed};
const PlantSpec kFig4Plant{SectorFn{LinearSector{0.8}, 0.8, 0.8}, 0.05, 0.1,
                           Topology::ActuatorPerturbed};

// Smallest root of x^2 - tr x + det = 0.
double min_eig_oracle(double a, double c, double d) {
  const double tr = a + d;
  const double det = a * d - c * c;
  return (tr - std::sqrt(tr * tr - 4.0 * det)) / 2.0;
}

}  // namespace

TEST_CASE("condition (i) examples") {
  auto c = check_condition_i(0.1, 0.15, 0.8);
  CHECK(c.holds);
  CHECK_THAT(c.margin, WithinAbs(0.905, 1e-15));
  c = check_condition_i(0.1, 0.5, 9.0);
  CHECK(c.holds);
  CHECK_THAT(c.margin, WithinAbs(0.05, 1e-15));
  c = check_condition_i(0.2, 0.5, 9.0);
  CHECK_FALSE(c.holds);
  CHECK_THAT(c.margin, WithinAbs(-0.9, 1e-15));
}

TEST_CASE("margin decreases in lambda and alpha2, and in epsilon when lambda + alpha2 > 0") {
  auto eps = GENERATE(take(10, random(0.001, 0.5)));
  auto lam = GENERATE(take(5, random(0.01, 5.0)));
  auto a2 = GENERATE(take(5, random(-0.5, 10.0)));
  const double h = 1e-6;
  const double m = check_condition_i(eps, lam, a2).margin;
  if (lam + a2 > 0.0) CHECK(check_condition_i(eps + h, lam, a2).margin < m);
  CHECK(check_condition_i(eps, lam + h, a2).margin < m);
  CHECK(check_condition_i(eps, lam, a2 + h).margin < m);
  CHECK(check_condition_i(eps, lam, a2).holds == (m > 0.0));
}

TEST_CASE("ell threshold examples") {
  // (9.5 / 1)^2 = 90.25 and 1.3^2 / (4 * 0.5 * 0.05) = 16.9
  CHECK_THAT(ell_threshold(fig5_params()), WithinRel(1525.225, 1e-12));
  // (0.95 / 0.05)^2 = 361 and 0.92^2 / (4 * 0.15 * 0.905) = 0.8464 / 0.543
  CHECK_THAT(ell_threshold(fig4_params()), WithinRel(361.0 * 0.8464 / 0.543, 1e-12));
  CHECK_THAT(ell_threshold(fig4_params()), WithinAbs(562.708, 1e-3));

  CertificateParams p = fig5_params();
  p.b = 1e8;
  CHECK(ell_threshold(p) < 1e-12);
  CHECK_THROWS_AS(ell_threshold(CertificateParams{0.2, 0.5, -3.0, 9.0, 1.0, 1.0}),
                  std::domain_error);
}

TEST_CASE("ell threshold is even in b") {
  auto b = GENERATE(take(20, random(0.01, 50.0)));
  CertificateParams p = fig5_params();
  p.b = b;
  const double plus = ell_threshold(p);
  p.b = -b;
  CHECK(ell_threshold(p) == plus);
}

TEST_CASE("S examples") {
  CHECK(s_value(0.0, 0.0, fig5_params(1526.0)) == 0.0);
  CHECK_THAT(s_value(1.0, 0.0, fig5_params(1526.0)), WithinAbs(0.05, 1e-15));
  CHECK_THAT(s_value(1.0, 1.0, fig5_params(1526.0)), WithinAbs(0.05 + 0.95 + 763.0, 1e-12));
  CHECK_THAT(s_value(1.0, 1.0, fig5_params(1526.0)), WithinAbs(764.0, 1e-12));
}

TEST_CASE("Lambda minimum eigenvalue examples") {
  const CertificateParams unit{0.0, 1.0, 0.0, 0.0, 1.0, 1.0};
  CHECK_THAT(lambda_matrix_min_eig(0.0, unit), WithinAbs(0.5, 1e-15));

  const CertificateParams p = fig5_params(1.01 * ell_threshold(fig5_params()));
  for (int i = 0; i < 1000; ++i) {
    const double a = -3.0 + 12.0 * i / 999.0;
    REQUIRE(lambda_matrix_min_eig(a, p) > 0.0);
  }

  CertificateParams degenerate = unit;
  degenerate.ell = 0.0;
  CHECK(lambda_matrix_min_eig(0.0, degenerate) <= 0.0);
}

TEST_CASE("Lambda minimum eigenvalue matches the characteristic polynomial") {
  auto eps = GENERATE(take(5, random(0.01, 0.2)));
  auto alpha = GENERATE(take(10, random(-5.0, 5.0)));
  CertificateParams p{eps, 0.7, -5.0, 5.0, -1.3, 40.0};
  const double a = 1.0 - eps * (p.lambda + p.alpha2);
  const double c = (p.lambda + p.alpha2) * (1.0 - eps * alpha) / (2.0 * p.b);
  const double d = p.lambda * p.ell;
  CHECK_THAT(lambda_matrix_min_eig(alpha, p), WithinAbs(min_eig_oracle(a, c, d), 1e-10));
}

TEST_CASE("any ell above the threshold certifies S and Lambda") {
  auto eps = GENERATE(take(6, random(0.005, 0.3)));
  auto lam = GENERATE(take(3, random(0.05, 2.0)));
  auto b = GENERATE(take(2, random(-3.0, 3.0)));
  const double a1 = -2.0, a2 = 1.5;
  if (!check_condition_i(eps, lam, a2).holds || std::abs(b) < 1e-3) return;
  CertificateParams p{eps, lam, a1, a2, b, 1.0};
  p.ell = 1.001 * ell_threshold(p);
  CHECK(s_nonneg_closed_form(p));
  CHECK(lambda_matrix_pd_closed_form(p));
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j) REQUIRE(s_value(5.0 * i, 5.0 * j, p) >= -1e-9);
  for (int k = 0; k <= 200; ++k) REQUIRE(lambda_matrix_min_eig(a1 + (a2 - a1) * k / 200.0, p) > 0.0);
}

TEST_CASE("closed forms reject an ell that is too small") {
  CertificateParams p = fig5_params(0.5 * ell_threshold(fig5_params()));
  CHECK_FALSE(lambda_matrix_pd_closed_form(p));
  p.ell = 0.9 * 0.1 * 90.25;  // below eps ((alpha2 + lambda) / b)^2
  CHECK_FALSE(s_nonneg_closed_form(p));
}

TEST_CASE("certify the sector-bounded example") {
  const NpiController c{0.5, BetaCosGain{ExpQuadraticBeta{1.0, 0.1}}};
  const CertificateReport r = certify(kFig5Plant, c, 1.01);
  CHECK(r.condition_i.holds);
  CHECK_THAT(r.ell_threshold, WithinRel(1525.225, 1e-9));
  CHECK_THAT(r.params.ell, WithinRel(1.01 * 1525.225, 1e-9));
  CHECK(r.s_nonneg.ok);
  CHECK(r.s_nonneg.closed_form_ok);
  CHECK(r.lambda_pd.ok);
  CHECK(r.lambda_pd.min_eigenvalue > 0.0);
  CHECK(r.beta_growth.passes);
  CHECK(r.beta_growth.cases == 12);
  CHECK_FALSE(r.corollary.applicable);
  CHECK(r.theorem_passes());
  CHECK(r.certified());
}

TEST_CASE("certify the linear example with z^2 cos z") {
  const NpiController c{0.15, BetaCosGain{PowerBeta{2.0}}};
  const CertificateReport r = certify(kFig4Plant, c, 1.01);
  CHECK(r.condition_i.holds);
  CHECK_FALSE(r.beta_growth.passes);
  CHECK_FALSE(r.theorem_passes());
  CHECK(r.corollary.applicable);
  CHECK(r.corollary.nussbaum == NussbaumClass::LikelyNussbaum);
  CHECK(r.corollary.passes);
  CHECK(r.certified());
}

TEST_CASE("certify rejects z cos z on the linear example") {
  const NpiController c{0.15, BetaCosGain{IdentityBeta{}}};
  const CertificateReport r = certify(kFig4Plant, c, 1.01);
  CHECK(r.corollary.nussbaum == NussbaumClass::NotNussbaumWitness);
  CHECK_FALSE(r.certified());
}

TEST_CASE("certify short-circuits when condition (i) fails") {
  PlantSpec p = kFig5Plant;
  p.epsilon = 0.2;
  const CertificateReport r = certify(p, NpiController{0.5, BetaCosGain{ExpQuadraticBeta{1.0, 0.1}}});
  CHECK(r.short_circuited);
  CHECK_FALSE(r.condition_i.holds);
  CHECK_THAT(r.condition_i.margin, WithinAbs(-0.9, 1e-15));
  CHECK_FALSE(r.certified());
  CHECK_THAT(format_report_text(r), ContainsSubstring("margin=-0.9"));
}

TEST_CASE("report formats") {
  const CertificateReport r =
      certify(kFig5Plant, NpiController{0.5, BetaCosGain{ExpQuadraticBeta{1.0, 0.1}}});
  const std::string kv = format_report_kv(r);
  CHECK_THAT(kv, ContainsSubstring("condition_i.margin = 0.0499999999999999"));
  CHECK_THAT(kv, ContainsSubstring("ell_threshold = 1525.22500000000"));
  CHECK_THAT(kv, ContainsSubstring("certified = true"));
  std::istringstream lines(kv);
  std::string line;
  while (std::getline(lines, line)) CHECK_THAT(line, ContainsSubstring(" = "));
  CHECK_THAT(format_report_text(r), ContainsSubstring("certified:          yes"));
}
