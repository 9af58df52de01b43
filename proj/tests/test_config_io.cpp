#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "npi/config.hpp"
#include "npi/experiments.hpp"
#include "npi/io.hpp"

using namespace npi;
using Catch::Matchers::ContainsSubstring;

namespace fs = std::filesystem;

namespace {

const char* kLinear = R"(# comment line
experiment.name = lin
plant.family = linear
plant.alpha = 0.8
plant.b = 0.05
plant.epsilon = 0.1   # trailing comment
controller.kind = npi
controller.lambda = 0.15
controller.beta = power
controller.p = 2
sim.dt = 1e-3
sim.t_end = 10
init.y0 = 5
)";

int error_line(const std::string& text) {
  try {
    parse_config(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("npi_test_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("parse a linear config") {
  const ExperimentConfig c = parse_config(kLinear);
  CHECK(c.name == "lin");
  CHECK(std::get<LinearSector>(c.plant.sector.kind).alpha == 0.8);
  CHECK(c.plant.sector.declared_alpha1 == 0.8);
  CHECK(c.plant.sector.declared_alpha2 == 0.8);
  CHECK(c.plant.b == 0.05);
  CHECK(c.plant.topology == Topology::ActuatorPerturbed);
  const auto& npi = std::get<NpiController>(c.controller);
  CHECK(npi.lambda == 0.15);
  CHECK(std::get<PowerBeta>(std::get<BetaCosGain>(npi.gain).beta).p == 2.0);
  CHECK(c.sim.method == Method::RK4);
  CHECK(c.sim.t_end == 10.0);
  CHECK(c.init.y0 == 5.0);
  CHECK(c.init.u0 == 0.0);
  CHECK(c.csv_name() == "lin.csv");
  CHECK(c.report_name() == "lin_certificate");
}

TEST_CASE("shipped fixtures parse") {
  const fs::path dir = NPI_CONFIG_DIR;
  for (const char* name : {"fig4_ng.cfg", "fig4_npi.cfg", "fig4_npin.cfg", "fig5.cfg",
                           "fig5_eps02.cfg"}) {
    INFO(name);
    CHECK_NOTHROW(load_config(dir / name));
  }
  const ExperimentConfig f5 = load_config(dir / "fig5.cfg");
  CHECK(f5.plant.sector.declared_alpha1 == -3.0);
  CHECK(f5.plant.sector.declared_alpha2 == 9.0);
  CHECK(f5.sim.method == Method::RKF45);
  CHECK(f5.output.svg == "fig5_run.svg");
  CHECK(std::holds_alternative<NgController>(load_config(dir / "fig4_ng.cfg").controller));
  CHECK_THROWS_AS(load_config(dir / "bad_unknown_key.cfg"), ConfigError);
}

TEST_CASE("fixtures agree with the built-in reproductions") {
  const fs::path dir = NPI_CONFIG_DIR;
  const std::pair<const char*, ExperimentConfig> pairs[] = {
      {"fig4_ng.cfg", fig4_config(Fig4Controller::NG)},
      {"fig4_npi.cfg", fig4_config(Fig4Controller::NPI)},
      {"fig4_npin.cfg", fig4_config(Fig4Controller::NPIN)},
      {"fig5.cfg", fig5_config()},
  };
  for (const auto& [file, builtin] : pairs) {
    INFO(file);
    const ExperimentConfig c = load_config(dir / file);
    CHECK(c.name == builtin.name);
    CHECK(c.plant.b == builtin.plant.b);
    CHECK(c.plant.epsilon == builtin.plant.epsilon);
    CHECK(c.sim.t_end == builtin.sim.t_end);
    CHECK(c.sim.rkf45.rel_tol == builtin.sim.rkf45.rel_tol);
    CHECK(c.sim.rkf45.abs_tol == builtin.sim.rkf45.abs_tol);
    CHECK(c.sim.sample_interval == builtin.sim.sample_interval);
    CHECK(c.init.y0 == builtin.init.y0);
    CHECK(lambda_of(c.controller) == lambda_of(builtin.controller));
  }
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_line("plant.family = linear\nplant.bogus = 1\n") == 2);
  CHECK(error_line("plant.family = linear\n\nthis line has no equals\n") == 3);
  CHECK(error_line("plant.family = linear\nplant.family = sinexp\n") == 2);
  CHECK(error_line("nodot = 3\n") == 1);
  CHECK(error_line("plant.family =\n") == 1);

  std::string bad_number = kLinear;
  bad_number.replace(bad_number.find("0.05"), 4, "abc");
  CHECK(error_line(bad_number) == 5);

  std::string zero_b = kLinear;
  zero_b.replace(zero_b.find("plant.b = 0.05"), 14, "plant.b = 0");
  CHECK(error_line(zero_b) == 3);  // plant validation reported at plant.family

  std::string unused = std::string(kLinear) + "controller.c1 = 2\n";
  CHECK(error_line(unused) == 14);

  std::string wrong_dt = kLinear;
  wrong_dt.replace(wrong_dt.find("sim.dt = 1e-3"), 13, "sim.dt = 0.5");
  CHECK(error_line(wrong_dt) == 11);

  std::string negative_q = std::string(kLinear) + "init.q0 = -1\n";
  CHECK(error_line(negative_q) == 14);

  try {
    parse_config("plant.family = cubic\n", "x.cfg");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK_THAT(e.what(), ContainsSubstring("x.cfg:1"));
    CHECK_THAT(e.what(), ContainsSubstring("cubic"));
  }
}

TEST_CASE("missing required keys") {
  CHECK_THROWS_AS(parse_config("plant.family = linear\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(""), ConfigError);
}

TEST_CASE("tabulated blocks") {
  const ExperimentConfig c = parse_config(R"(
plant.family = tabulated
plant.samples = -2:-4, 0:0, 2:2
plant.alpha0 = 1.5
plant.alpha1 = 1
plant.alpha2 = 2
plant.b = 1
plant.topology = nominal
controller.kind = npi
controller.lambda = 1
controller.beta = tabulated
controller.samples = 0:0, 10:-10
)");
  const auto& t = std::get<TabulatedSector>(c.plant.sector.kind);
  CHECK(t.y.size() == 3);
  CHECK(t.alpha_at_zero == 1.5);
  CHECK(c.plant.topology == Topology::Nominal);
  const auto& g = std::get<TabulatedGain>(std::get<NpiController>(c.controller).gain);
  CHECK(g.value.back() == -10.0);

  CHECK(error_line("plant.family = tabulated\nplant.samples = 0:1, 1:2\nplant.alpha1 = 0\n"
                   "plant.alpha2 = 1\nplant.b = 1\nplant.epsilon = 0.1\n") == 1);
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const std::string s = format_double(v);
    REQUIRE(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-2.5) == "-2.5");
}

TEST_CASE("trajectory csv round-trip") {
  const ExperimentConfig cfg = fig4_config(Fig4Controller::NPIN);
  const Trajectory tr = integrate(cfg.plant, cfg.controller, cfg.init, cfg.sim);
  const std::string csv = trajectory_csv(tr);
  CHECK(csv.rfind("t,y,u,u_nom,z\n", 0) == 0);
  CHECK(csv.back() == '\n');
  CHECK(csv.find(",\n") == std::string::npos);
  const Trajectory back = parse_trajectory_csv(csv);
  CHECK(back.t == tr.t);
  CHECK(back.y == tr.y);
  CHECK(back.u == tr.u);
  CHECK(back.u_nom == tr.u_nom);
  CHECK(back.z == tr.z);
  CHECK(trajectory_csv(back) == csv);

  CHECK_THROWS(parse_trajectory_csv("t,y\n"));
  CHECK_THROWS(parse_trajectory_csv("t,y,u,u_nom,z\n1,2,3,4\n"));
  CHECK_THROWS(parse_trajectory_csv("t,y,u,u_nom,z\n1,2,3,4,5,\n"));
}

TEST_CASE("atomic writes") {
  const fs::path dir = temp_dir("atomic");
  const fs::path file = dir / "nested" / "out.csv";
  write_file_atomic(file, "first\n");
  CHECK(read_file(file) == "first\n");
  write_file_atomic(file, "second\n");
  CHECK(read_file(file) == "second\n");
  CHECK_FALSE(fs::exists(file.string() + ".tmp"));
  fs::remove_all(dir);
}
