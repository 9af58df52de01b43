#include <catch_amalgamated.hpp>

#include <cmath>

#include "npi/controller.hpp"

using namespace npi;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const PlantSpec kLinear{SectorFn{LinearSector{0.8}, 0.8, 0.8}, 0.05, 0.1,
                        Topology::ActuatorPerturbed};
const PlantSpec kSinExp{SectorFn{SinExpSector{3.0, 2.0}, -3.0, 9.0}, 1.0, 0.1,
                        Topology::ActuatorPerturbed};

}  // namespace

TEST_CASE("controller output examples") {
  const ControllerSpec p1 = NpiController{0.5, BetaCosGain{PowerBeta{1.0}}};
  const ControllerOutput o = controller_output(p1, 0.0, 5.0);
  CHECK(o.z == 12.5);
  CHECK_THAT(o.u_nom, WithinRel(12.5 * std::cos(12.5) * 5.0, 1e-15));
  CHECK_THAT(o.u_nom, WithinAbs(62.362, 1e-3));  // cos(12.5) = cos(12.5 - 4 pi) ~ 0.99780

  const ControllerOutput ng = controller_output(NgController{0.15}, 0.0, 5.0);
  CHECK(ng.u_nom == 0.0);
  CHECK(ng.z == 0.0);

  const ControllerSpec eq = NpiController{0.3, BetaCosGain{ExpQuadraticBeta{1.0, 0.1}}};
  const ControllerOutput zero = controller_output(eq, 0.0, 0.0);
  CHECK(zero.z == 0.0);
  CHECK(zero.u_nom == 0.0);
}

TEST_CASE("NG output uses zeta squared cos zeta") {
  auto zeta = GENERATE(take(30, random(0.0, 50.0)));
  auto y = GENERATE(take(3, random(-5.0, 5.0)));
  const ControllerOutput o = controller_output(NgController{0.15}, zeta, y);
  CHECK_THAT(o.u_nom, WithinAbs(zeta * zeta * std::cos(zeta) * y, 1e-12 * (1 + zeta * zeta)));
  CHECK(o.z == zeta);
}

TEST_CASE("controller rhs examples") {
  CHECK_THAT(controller_rhs(NgController{0.15}, 5.0), WithinRel(3.75, 1e-15));
  CHECK(controller_rhs(NpiController{0.5, BetaCosGain{IdentityBeta{}}}, 0.0) == 0.0);
  CHECK(controller_rhs(NpiController{0.5, BetaCosGain{IdentityBeta{}}}, -2.0) == 2.0);
}

TEST_CASE("NG and nPI share the update law") {
  auto y = GENERATE(take(50, random(-100.0, 100.0)));
  const NgController ng{0.37};
  const NpiController npi{0.37, BetaCosGain{PowerBeta{2.0}}};
  CHECK(controller_rhs(ng, y) == controller_rhs(npi, y));
}

TEST_CASE("u_nom is odd in y with q held fixed") {
  const int which = GENERATE(0, 1, 2);
  const GainSpec gains[] = {BetaCosGain{PowerBeta{2.0}}, BetaCosGain{ExpQuadraticBeta{1.0, 0.1}},
                            BetaCosGain{IdentityBeta{}}};
  const ControllerSpec c = NpiController{0.5, gains[which]};
  auto q = GENERATE(take(5, random(0.0, 5.0)));
  auto y = GENERATE(take(20, random(-4.0, 4.0)));
  const ControllerOutput plus = controller_output(c, q, y);
  const ControllerOutput minus = controller_output(c, q, -y);
  CHECK(plus.z == minus.z);
  CHECK(plus.u_nom == -minus.u_nom);
}

TEST_CASE("z identity residual") {
  const NpiController npi{0.15, BetaCosGain{PowerBeta{2.0}}};
  CHECK(z_dot_identity_check(kLinear, npi, 5.0, 1.0) <= 1e-12);
  CHECK(z_dot_identity_check(kLinear, npi, 0.0, 17.0) <= 1e-12);

  const NpiController fig5{0.5, BetaCosGain{ExpQuadraticBeta{1.0, 0.1}}};
  auto y = GENERATE(take(100, random(-3.0, 3.0)));
  auto u = GENERATE(take(3, random(-50.0, 50.0)));
  const double scale = 1.0 + std::abs(y * u) + y * y * 10.0;
  CHECK(z_dot_identity_check(kSinExp, fig5, y, u) <= 1e-14 * scale);
}

TEST_CASE("gain overflow is signalled") {
  const ControllerSpec c = NpiController{0.5, BetaCosGain{ExpQuadraticBeta{1.0, 1.0}}};
  const ControllerOutput o = controller_output(c, 1000.0, 1.0);
  CHECK(o.overflow);
}

TEST_CASE("controller validation") {
  CHECK_THROWS_AS(validate(ControllerSpec{NgController{0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(ControllerSpec{NpiController{-1.0, BetaCosGain{IdentityBeta{}}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(ControllerSpec{NpiController{1.0, BetaCosGain{PowerBeta{-1.0}}}}),
                  std::invalid_argument);
  CHECK(lambda_of(NgController{0.15}) == 0.15);
}
