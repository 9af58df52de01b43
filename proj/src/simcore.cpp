#include "npi/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace npi {

std::string to_string(Method m) { return m == Method::RK4 ? "rk4" : "rkf45"; }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Completed:
      return "Completed";
    case Termination::Diverged:
      return "Diverged";
    case Termination::Overflow:
      return "Overflow";
  }
  return "Overflow";
}

std::string to_string(VerdictClass v) {
  switch (v) {
    case VerdictClass::Converged:
      return "Converged";
    case VerdictClass::BoundedNonConverged:
      return "BoundedNonConverged";
    case VerdictClass::Diverged:
      return "Diverged";
  }
  return "Diverged";
}

void validate(const SimConfig& cfg, const PlantSpec& plant) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(cfg.dt)) throw std::invalid_argument("sim.dt must be > 0");
  if (!positive(cfg.t_end)) throw std::invalid_argument("sim.t_end must be > 0");
  if (!positive(cfg.divergence_threshold))
    throw std::invalid_argument("sim.divergence_threshold must be > 0");
  if (cfg.sample_stride < 1) throw std::invalid_argument("sim.sample_stride must be >= 1");
  if (!(cfg.sample_interval >= 0.0) || !std::isfinite(cfg.sample_interval))
    throw std::invalid_argument("sim.sample_interval must be >= 0");
  if (cfg.method == Method::RK4) {
    if (plant.topology == Topology::ActuatorPerturbed && cfg.dt > plant.epsilon / 5.0)
      throw std::invalid_argument("rk4 needs sim.dt <= plant.epsilon / 5 to resolve the actuator");
  } else {
    const Rkf45Options& o = cfg.rkf45;
    if (!positive(o.rel_tol) || !(o.abs_tol >= 0.0))
      throw std::invalid_argument("rkf45 tolerances must be positive");
    if (!positive(o.dt_min) || !positive(o.dt_max) || !(o.dt_min < o.dt_max))
      throw std::invalid_argument("rkf45 needs 0 < dt_min < dt_max");
  }
}

namespace {

using State = StateN<3>;  // (y, u, q)

class ClosedLoop {
 public:
  ClosedLoop(const PlantSpec& plant, const ControllerSpec& ctrl) : plant_(plant), ctrl_(ctrl) {}

  std::optional<State> operator()(const State& s) const {
    try {
      const ControllerOutput out = controller_output(ctrl_, s[2], s[0]);
      if (out.overflow) return std::nullopt;
      const std::optional<PlantRates> rates = plant_rhs(plant_, s[0], s[1], out.u_nom);
      if (!rates) return std::nullopt;
      return State{rates->dy, rates->du, controller_rhs(ctrl_, s[0])};
    } catch (const std::domain_error& e) {
      // a tabulated plant or gain was evaluated outside its samples
      fault_ = e.what();
      return std::nullopt;
    }
  }

  const std::string& fault() const { return fault_; }

  void record(Trajectory& traj, double t, const State& s) const {
    const ControllerOutput out = controller_output(ctrl_, s[2], s[0]);
    traj.t.push_back(t);
    traj.y.push_back(s[0]);
    traj.u.push_back(plant_.topology == Topology::Nominal ? out.u_nom : s[1]);
    traj.u_nom.push_back(out.u_nom);
    traj.z.push_back(out.z);
    traj.q.push_back(s[2]);
  }

 private:
  const PlantSpec& plant_;
  const ControllerSpec& ctrl_;
  mutable std::string fault_;
};

class Recorder {
 public:
  Recorder(const ClosedLoop& loop, Trajectory& traj, const SimConfig& cfg)
      : loop_(loop), traj_(traj), cfg_(cfg) {}

  void initial(double t, const State& s) {
    loop_.record(traj_, t, s);
    last_t_ = t;
  }

  void step(std::size_t index, double t, const State& s) {
    bool take;
    if (cfg_.sample_interval > 0.0)
      take = t - last_t_ >= cfg_.sample_interval * (1.0 - 1e-9);
    else
      take = index % static_cast<std::size_t>(cfg_.sample_stride) == 0;
    if (take) {
      loop_.record(traj_, t, s);
      last_t_ = t;
    }
  }

  void final(double t, const State& s) {
    if (traj_.t.empty() || traj_.t.back() != t) loop_.record(traj_, t, s);
  }

 private:
  const ClosedLoop& loop_;
  Trajectory& traj_;
  const SimConfig& cfg_;
  double last_t_ = 0.0;
};

bool finite_state(const State& s) {
  return std::isfinite(s[0]) && std::isfinite(s[1]) && std::isfinite(s[2]);
}

void terminate(Trajectory& traj, Termination why, double t, std::string diagnostic) {
  traj.termination = why;
  traj.termination_time = t;
  traj.diagnostic = std::move(diagnostic);
}

std::string at_time(const char* what, double t) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at t=" << t;
  return os.str();
}

void run_rk4(const ClosedLoop& loop, Recorder& rec, Trajectory& traj, State s,
             const SimConfig& cfg) {
  const auto steps =
      static_cast<std::size_t>(std::max(1.0, std::ceil(cfg.t_end / cfg.dt - 1e-9)));
  double t = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_next = k == steps ? cfg.t_end : static_cast<double>(k) * cfg.dt;
    const std::optional<State> next = step_rk4<3>(loop, s, t_next - t);
    if (!next || !finite_state(*next)) {
      rec.final(t, s);
      terminate(traj, Termination::Overflow, t,
                at_time(loop.fault().empty() ? "non-finite stage" : loop.fault().c_str(), t));
      return;
    }
    s = *next;
    t = t_next;
    traj.steps = k;
    if (std::abs(s[0]) >= cfg.divergence_threshold) {
      rec.final(t, s);
      terminate(traj, Termination::Diverged, t, at_time("|y| crossed the divergence threshold", t));
      return;
    }
    rec.step(k, t, s);
  }
  rec.final(t, s);
  terminate(traj, Termination::Completed, t, "");
}

void run_rkf45(const ClosedLoop& loop, Recorder& rec, Trajectory& traj, State s,
               const SimConfig& cfg) {
  const Rkf45Options& o = cfg.rkf45;
  double t = 0.0;
  double h = std::clamp(cfg.dt, o.dt_min, o.dt_max);
  std::size_t accepted = 0;

  while (t < cfg.t_end) {
    const double remaining = cfg.t_end - t;
    const bool last = h >= remaining;
    const double step = last ? remaining : h;
    const std::optional<Rkf45Trial<3>> trial = step_rkf45<3>(loop, s, step);
    if (!loop.fault().empty()) {
      rec.final(t, s);
      terminate(traj, Termination::Overflow, t, at_time(loop.fault().c_str(), t));
      return;
    }

    double err = 0.0;
    if (trial) {
      for (std::size_t j = 0; j < 3; ++j) {
        const double scale =
            o.abs_tol + o.rel_tol * std::max(std::abs(s[j]), std::abs(trial->next[j]));
        err = std::max(err, std::abs(trial->error[j]) / scale);
      }
    }

    if (trial && err <= 1.0) {
      s = trial->next;
      t = last ? cfg.t_end : t + step;
      traj.steps = ++accepted;
      if (std::abs(s[0]) >= cfg.divergence_threshold) {
        rec.final(t, s);
        terminate(traj, Termination::Diverged, t,
                  at_time("|y| crossed the divergence threshold", t));
        return;
      }
      rec.step(accepted, t, s);
    } else {
      ++traj.rejected_steps;
      if (step <= o.dt_min * (1.0 + 1e-12) && !last) {
        rec.final(t, s);
        terminate(traj, Termination::Overflow, t,
                  at_time(trial ? "step size underflow" : "non-finite stage at minimum step", t));
        return;
      }
    }

    double factor;
    if (!trial)
      factor = 0.1;
    else if (err == 0.0)
      factor = 5.0;
    else
      factor = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = std::clamp(step * factor, o.dt_min, o.dt_max);
  }
  rec.final(t, s);
  terminate(traj, Termination::Completed, t, "");
}

}  // namespace

Trajectory integrate(const PlantSpec& plant, const ControllerSpec& ctrl, const InitialState& init,
                     const SimConfig& cfg) {
  validate(plant);
  validate(ctrl);
  validate(cfg, plant);
  if (!std::isfinite(init.y0) || !std::isfinite(init.u0) || !std::isfinite(init.q0))
    throw std::invalid_argument("initial conditions must be finite");
  if (init.q0 < 0.0) throw std::invalid_argument("initial controller state q0 must be >= 0");

  Trajectory traj;
  traj.config = cfg;
  const ClosedLoop loop(plant, ctrl);
  Recorder rec(loop, traj, cfg);
  const State s0{init.y0, init.u0, init.q0};
  rec.initial(0.0, s0);

  if (std::abs(init.y0) >= cfg.divergence_threshold) {
    terminate(traj, Termination::Diverged, 0.0, "initial |y| at the divergence threshold");
    return traj;
  }
  if (controller_output(ctrl, init.q0, init.y0).overflow) {
    terminate(traj, Termination::Overflow, 0.0, "gain overflow at the initial state");
    return traj;
  }

  if (cfg.method == Method::RK4)
    run_rk4(loop, rec, traj, s0, cfg);
  else
    run_rkf45(loop, rec, traj, s0, cfg);
  return traj;
}

Verdict classify(const Trajectory& traj, double tol, double tail_fraction) {
  if (traj.empty()) throw std::invalid_argument("classify needs a nonempty trajectory");
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
    throw std::invalid_argument("classify needs 0 < tail_fraction < 1");

  Verdict v;
  const std::size_t last = traj.size() - 1;
  v.final_abs = {std::abs(traj.y[last]), std::abs(traj.u[last]), std::abs(traj.u_nom[last])};

  const double t0 = traj.t.front();
  const double cut = t0 + (1.0 - tail_fraction) * (traj.t.back() - t0);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.t[i] < cut) continue;
    const double ay = std::abs(traj.y[i]);
    v.tail_max_abs_y = std::max(v.tail_max_abs_y, ay);
    v.tail_max_abs =
        std::max({v.tail_max_abs, ay, std::abs(traj.u[i]), std::abs(traj.u_nom[i])});
  }

  if (traj.termination != Termination::Completed ||
      v.final_abs[0] >= traj.config.divergence_threshold)
    v.cls = VerdictClass::Diverged;
  else if (v.tail_max_abs < tol)
    v.cls = VerdictClass::Converged;
  else
    v.cls = VerdictClass::BoundedNonConverged;
  return v;
}

}  // namespace npi
