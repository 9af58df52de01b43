#include "npi/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace npi {

ConfigError::ConfigError(const std::string& origin, int line, const std::string& message)
    : std::runtime_error(origin + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                         message),
      line_(line) {}

namespace {

const std::set<std::string> kKnownKeys = {
    "experiment.name",
    "plant.family",          "plant.alpha",         "plant.a",
    "plant.b_amp",           "plant.samples",       "plant.alpha0",
    "plant.b",               "plant.epsilon",       "plant.topology",
    "plant.alpha1",          "plant.alpha2",
    "controller.kind",       "controller.lambda",   "controller.beta",
    "controller.p",          "controller.c1",       "controller.c2",
    "controller.samples",
    "sim.dt",                "sim.t_end",           "sim.method",
    "sim.rel_tol",           "sim.abs_tol",         "sim.dt_min",
    "sim.dt_max",            "sim.divergence_threshold",
    "sim.sample_stride",     "sim.sample_interval",
    "init.y0",               "init.u0",             "init.q0",
    "certify.ell_factor",
    "output.csv",            "output.svg",          "output.report",
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, std::string origin)
      : entries_(std::move(entries)), origin_(std::move(origin)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  int line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  std::optional<std::string> text(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    used_.insert(key);
    return it->second.value;
  }

  std::string required_text(const std::string& key) {
    auto v = text(key);
    if (!v) throw ConfigError(origin_, 0, "missing required key '" + key + "'");
    return *v;
  }

  std::optional<double> number(const std::string& key) {
    auto v = text(key);
    if (!v) return std::nullopt;
    return parse_number(key, *v);
  }

  double number_or(const std::string& key, double fallback) {
    return number(key).value_or(fallback);
  }

  double required_number(const std::string& key) {
    return parse_number(key, required_text(key));
  }

  std::vector<std::pair<double, double>> pairs(const std::string& key) {
    const std::string raw = required_text(key);
    std::vector<std::pair<double, double>> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string_view t = trim(item);
      const auto colon = t.find(':');
      if (colon == std::string_view::npos) fail(key, "expected 'x:value' pairs separated by ','");
      out.emplace_back(parse_number(key, std::string(trim(t.substr(0, colon)))),
                       parse_number(key, std::string(trim(t.substr(colon + 1)))));
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw ConfigError(origin_, line_of(key), key + ": " + message);
  }

  void reject_unused() const {
    for (const auto& [key, entry] : entries_)
      if (!used_.count(key))
        throw ConfigError(origin_, entry.line, "key '" + key + "' is not used by this configuration");
  }

 private:
  double parse_number(const std::string& key, const std::string& raw) const {
    double v = 0.0;
    const char* first = raw.data();
    const char* last = raw.data() + raw.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
      fail(key, "'" + raw + "' is not a finite number");
    return v;
  }

  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
  std::string origin_;
};

template <class Fn>
void with_line(const std::string& origin, int line, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(origin, line, e.what());
  }
}

PlantSpec read_plant(Reader& r, const std::string& origin) {
  PlantSpec plant;
  const std::string family = r.required_text("plant.family");
  if (family == "linear") {
    plant.sector.kind = LinearSector{r.required_number("plant.alpha")};
  } else if (family == "sinexp") {
    plant.sector.kind = SinExpSector{r.required_number("plant.a"), r.required_number("plant.b_amp")};
  } else if (family == "tabulated") {
    TabulatedSector t;
    for (const auto& [y, f] : r.pairs("plant.samples")) {
      t.y.push_back(y);
      t.f.push_back(f);
    }
    t.alpha_at_zero = r.number("plant.alpha0");
    plant.sector.kind = std::move(t);
  } else {
    r.fail("plant.family", "unknown family '" + family + "' (linear, sinexp, tabulated)");
  }

  const auto analytic = analytic_sector_bounds(plant.sector.kind);
  const auto a1 = r.number("plant.alpha1");
  const auto a2 = r.number("plant.alpha2");
  if (!analytic && (!a1 || !a2))
    r.fail("plant.family", "tabulated sectors need plant.alpha1 and plant.alpha2");
  plant.sector.declared_alpha1 = a1 ? *a1 : analytic->first;
  plant.sector.declared_alpha2 = a2 ? *a2 : analytic->second;

  plant.b = r.required_number("plant.b");
  const std::string topology = r.text("plant.topology").value_or("actuator");
  if (topology == "actuator")
    plant.topology = Topology::ActuatorPerturbed;
  else if (topology == "nominal")
    plant.topology = Topology::Nominal;
  else
    r.fail("plant.topology", "expected 'actuator' or 'nominal'");
  if (plant.topology == Topology::ActuatorPerturbed)
    plant.epsilon = r.required_number("plant.epsilon");
  else
    plant.epsilon = r.number_or("plant.epsilon", plant.epsilon);

  with_line(origin, r.line_of("plant.family"), [&] { validate(plant); });
  return plant;
}

ControllerSpec read_controller(Reader& r, const std::string& origin) {
  const std::string kind = r.required_text("controller.kind");
  const double lambda = r.required_number("controller.lambda");
  ControllerSpec spec;
  if (kind == "ng") {
    spec = NgController{lambda};
  } else if (kind == "npi") {
    const std::string beta = r.required_text("controller.beta");
    GainSpec gain;
    if (beta == "power") {
      gain = BetaCosGain{PowerBeta{r.required_number("controller.p")}};
    } else if (beta == "expquad") {
      gain = BetaCosGain{
          ExpQuadraticBeta{r.required_number("controller.c1"), r.required_number("controller.c2")}};
    } else if (beta == "identity") {
      gain = BetaCosGain{IdentityBeta{}};
    } else if (beta == "tabulated") {
      TabulatedGain t;
      for (const auto& [z, v] : r.pairs("controller.samples")) {
        t.z.push_back(z);
        t.value.push_back(v);
      }
      gain = std::move(t);
    } else {
      r.fail("controller.beta", "unknown beta '" + beta + "' (power, expquad, identity, tabulated)");
    }
    spec = NpiController{lambda, std::move(gain)};
  } else {
    r.fail("controller.kind", "unknown kind '" + kind + "' (npi, ng)");
  }
  with_line(origin, r.line_of("controller.kind"), [&] { validate(spec); });
  return spec;
}

SimConfig read_sim(Reader& r) {
  SimConfig sim;
  sim.dt = r.number_or("sim.dt", sim.dt);
  sim.t_end = r.number_or("sim.t_end", sim.t_end);
  const std::string method = r.text("sim.method").value_or("rk4");
  if (method == "rk4")
    sim.method = Method::RK4;
  else if (method == "rkf45")
    sim.method = Method::RKF45;
  else
    r.fail("sim.method", "expected 'rk4' or 'rkf45'");
  if (sim.method == Method::RKF45) {
    sim.rkf45.rel_tol = r.number_or("sim.rel_tol", sim.rkf45.rel_tol);
    sim.rkf45.abs_tol = r.number_or("sim.abs_tol", sim.rkf45.abs_tol);
    sim.rkf45.dt_min = r.number_or("sim.dt_min", sim.rkf45.dt_min);
    sim.rkf45.dt_max = r.number_or("sim.dt_max", sim.rkf45.dt_max);
  }
  sim.divergence_threshold = r.number_or("sim.divergence_threshold", sim.divergence_threshold);
  if (const auto stride = r.number("sim.sample_stride")) {
    if (*stride < 1 || *stride != std::floor(*stride))
      r.fail("sim.sample_stride", "expected a positive integer");
    sim.sample_stride = static_cast<int>(*stride);
  }
  sim.sample_interval = r.number_or("sim.sample_interval", sim.sample_interval);
  return sim;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::string& origin) {
  std::map<std::string, Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(origin, line_no, "expected 'section.key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.find('.') == std::string::npos)
      throw ConfigError(origin, line_no, "key '" + key + "' must be of the form section.key");
    if (!kKnownKeys.count(key)) throw ConfigError(origin, line_no, "unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(origin, line_no, "key '" + key + "' has no value");
    if (entries.count(key))
      throw ConfigError(origin, line_no,
                        "duplicate key '" + key + "' (first on line " +
                            std::to_string(entries[key].line) + ")");
    entries[key] = {value, line_no};
    if (end == text.size()) break;
  }

  Reader r(std::move(entries), origin);
  ExperimentConfig cfg;
  cfg.name = r.text("experiment.name").value_or(cfg.name);
  cfg.plant = read_plant(r, origin);
  cfg.controller = read_controller(r, origin);
  cfg.sim = read_sim(r);
  cfg.init.y0 = r.number_or("init.y0", 0.0);
  cfg.init.u0 = r.number_or("init.u0", 0.0);
  cfg.init.q0 = r.number_or("init.q0", 0.0);
  cfg.ell_factor = r.number_or("certify.ell_factor", cfg.ell_factor);
  cfg.output.csv = r.text("output.csv").value_or("");
  cfg.output.svg = r.text("output.svg").value_or("");
  cfg.output.report = r.text("output.report").value_or("");
  r.reject_unused();

  with_line(origin, r.line_of("sim.dt"), [&] { validate(cfg.sim, cfg.plant); });
  if (cfg.init.q0 < 0.0) r.fail("init.q0", "must be >= 0");
  if (!(cfg.ell_factor > 1.0)) r.fail("certify.ell_factor", "must be > 1");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace npi
