#include <catch_amalgamated.hpp>

#include <cmath>

#include "npi/experiments.hpp"
#include "npi/io.hpp"

using namespace npi;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

TEST_CASE("grid parsing") {
  CHECK(parse_grid("").empty());
  CHECK(parse_grid("0.1") == std::vector<double>{0.1});
  CHECK(parse_grid("0.05,0.1, 2") == std::vector<double>{0.05, 0.1, 2.0});
  const auto r = parse_grid("0.01:0.1:10");
  REQUIRE(r.size() == 10);
  CHECK(r.front() == 0.01);
  CHECK(r.back() == 0.1);
  CHECK_THAT(r[4], WithinAbs(0.05, 1e-15));
  CHECK(parse_grid("3:7:1") == std::vector<double>{3.0});
  CHECK_THROWS_AS(parse_grid("a,b"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("0:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("0:1:2.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("0:1:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("1,,2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("inf"), std::invalid_argument);
}

TEST_CASE("empty sweep gives a header-only csv") {
  const auto cells = run_sweep(fig5_config(), {}, {0.5});
  CHECK(cells.empty());
  CHECK(sweep_csv(cells) == "epsilon,lambda,verdict,tail_max_abs_y,margin\n");
}

TEST_CASE("oversized sweeps are refused") {
  const std::vector<double> many(101, 0.1);
  CHECK_THROWS_AS(run_sweep(fig5_config(), many, many), std::invalid_argument);
}

TEST_CASE("sweep cells are independent of the thread count") {
  ExperimentConfig base = fig4_config(Fig4Controller::NPIN);
  base.sim.t_end = 20.0;
  const std::vector<double> eps{0.02, 0.05, 0.1, -1.0};
  const std::vector<double> lambdas{0.1, 0.15};
  const auto serial = run_sweep(base, eps, lambdas, 1);
  const auto parallel = run_sweep(base, eps, lambdas, 3);
  CHECK(sweep_csv(serial) == sweep_csv(parallel));
  REQUIRE(serial.size() == 8);
  CHECK(serial[0].epsilon == 0.02);
  CHECK(serial[1].lambda == 0.15);
  CHECK_THAT(serial[2].margin, WithinAbs(1.0 - 0.05 * (0.1 + 0.8), 1e-15));
  CHECK(serial[6].verdict == "Invalid");
  CHECK(std::isnan(serial[6].tail_max_abs_y));
  for (std::size_t i = 0; i < 6; ++i) CHECK(serial[i].verdict != "Invalid");
}

TEST_CASE("sector-bounded reproduction converges") {
  const Expectation e = reproduce_fig5();
  CHECK(e.met());
  CHECK(e.result.trajectory.termination == Termination::Completed);
  CHECK(e.result.verdict.tail_max_abs < 1e-2);
  CHECK(e.result.seconds < 5.0);
  CHECK_THAT(e.summary(), ContainsSubstring("Converged (expected Converged)"));
  const std::string svg = fig5_svg(e);
  CHECK_THAT(svg, ContainsSubstring("<svg"));
  CHECK_THAT(svg, ContainsSubstring("u_nom(t)"));
}

TEST_CASE("sector-bounded reproduction at rest stays at zero") {
  Overrides o;
  o.y0 = 0.0;
  o.u0 = 0.0;
  const Expectation e = reproduce_fig5(o);
  CHECK(e.met());
  for (std::size_t i = 0; i < e.result.trajectory.size(); ++i) {
    REQUIRE(e.result.trajectory.y[i] == 0.0);
    REQUIRE(e.result.trajectory.u[i] == 0.0);
    REQUIRE(e.result.trajectory.u_nom[i] == 0.0);
  }
}

TEST_CASE("overrides") {
  ExperimentConfig c = fig5_config();
  Overrides o;
  o.dt = 1e-4;
  o.t_end = 3.0;
  o.method = Method::RK4;
  o.epsilon = 0.05;
  apply(o, c);
  CHECK(c.sim.dt == 1e-4);
  CHECK(c.sim.t_end == 3.0);
  CHECK(c.sim.method == Method::RK4);
  CHECK(c.plant.epsilon == 0.05);
  CHECK(c.init.y0 == 5.0);
}

TEST_CASE("reproduction configs") {
  const ExperimentConfig ng = fig4_config(Fig4Controller::NG);
  CHECK(std::holds_alternative<NgController>(ng.controller));
  CHECK(ng.plant.b == 0.05);
  CHECK(ng.plant.epsilon == 0.1);
  CHECK(ng.init.y0 == 5.0);
  const auto& npi = std::get<NpiController>(fig4_config(Fig4Controller::NPI).controller);
  CHECK(std::holds_alternative<IdentityBeta>(std::get<BetaCosGain>(npi.gain).beta));
  const auto& npin = std::get<NpiController>(fig4_config(Fig4Controller::NPIN).controller);
  CHECK(std::get<PowerBeta>(std::get<BetaCosGain>(npin.gain).beta).p == 2.0);
  const ExperimentConfig f5 = fig5_config();
  const auto& g = std::get<ExpQuadraticBeta>(
      std::get<BetaCosGain>(std::get<NpiController>(f5.controller).gain).beta);
  CHECK(g.c1 == 1.0);
  CHECK(g.c2 == 0.1);
}
