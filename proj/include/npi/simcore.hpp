#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "npi/controller.hpp"
#include "npi/plant.hpp"

namespace npi {

enum class Method { RK4, RKF45 };

std::string to_string(Method m);

struct Rkf45Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  double dt_min = 1e-13;
  double dt_max = 1e-2;
};

struct SimConfig {
  double dt = 1e-3;  // fixed step for RK4, initial step for RKF45
  double t_end = 30.0;
  Method method = Method::RK4;
  Rkf45Options rkf45;
  double divergence_threshold = 1e3;
  int sample_stride = 1;
  // When > 0, record a step once at least this much time has passed since
  // the last recorded sample; sample_stride is then ignored.
  double sample_interval = 0.0;
};

/// Throws std::invalid_argument. RK4 on an actuator-perturbed plant needs
/// dt <= epsilon / 5.
void validate(const SimConfig& cfg, const PlantSpec& plant);

struct InitialState {
  double y0 = 0.0;
  double u0 = 0.0;
  double q0 = 0.0;  // integral part of z for nPI, zeta(0) for NG
};

enum class Termination { Completed, Diverged, Overflow };

std::string to_string(Termination t);

struct Trajectory {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> u;
  std::vector<double> u_nom;
  std::vector<double> z;
  std::vector<double> q;  // controller state; not part of the CSV schema

  Termination termination = Termination::Completed;
  double termination_time = 0.0;
  std::string diagnostic;
  SimConfig config;
  std::size_t steps = 0;           // accepted steps
  std::size_t rejected_steps = 0;  // RKF45 only

  std::size_t size() const { return t.size(); }
  bool empty() const { return t.empty(); }
};

Trajectory integrate(const PlantSpec& plant, const ControllerSpec& ctrl, const InitialState& init,
                     const SimConfig& cfg);

enum class VerdictClass { Converged, BoundedNonConverged, Diverged };

std::string to_string(VerdictClass v);

struct Verdict {
  VerdictClass cls = VerdictClass::Diverged;
  double tail_max_abs_y = 0.0;
  double tail_max_abs = 0.0;  // max of |y|, |u|, |u_nom| over the tail
  std::array<double, 3> final_abs{};  // |y|, |u|, |u_nom| at the last sample
};

/// The tail is the last tail_fraction of the recorded time span.
Verdict classify(const Trajectory& traj, double tol, double tail_fraction);

// ---------------------------------------------------------------------------
// Explicit one-step methods over autonomous systems. `rhs` maps a state to
// std::optional<state>; an empty result or a non-finite stage makes the step
// fail.

template <std::size_t N>
using StateN = std::array<double, N>;

namespace detail {

template <std::size_t N>
bool all_finite(const StateN<N>& s) {
  for (const double v : s)
    if (!std::isfinite(v)) return false;
  return true;
}

template <std::size_t N, std::size_t K>
StateN<N> combine(const StateN<N>& base, double h, const std::array<const StateN<N>*, K>& k,
                  const std::array<double, K>& w) {
  StateN<N> out = base;
  for (std::size_t j = 0; j < N; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < K; ++i) acc += w[i] * (*k[i])[j];
    out[j] += h * acc;
  }
  return out;
}

}  // namespace detail

/// Classical fourth-order Runge-Kutta step.
template <std::size_t N, class Rhs>
std::optional<StateN<N>> step_rk4(Rhs&& rhs, const StateN<N>& s, double dt) {
  using detail::combine;
  const std::optional<StateN<N>> k1 = rhs(s);
  if (!k1 || !detail::all_finite(*k1)) return std::nullopt;
  const std::optional<StateN<N>> k2 = rhs(combine<N, 1>(s, 0.5 * dt, {&*k1}, {1.0}));
  if (!k2 || !detail::all_finite(*k2)) return std::nullopt;
  const std::optional<StateN<N>> k3 = rhs(combine<N, 1>(s, 0.5 * dt, {&*k2}, {1.0}));
  if (!k3 || !detail::all_finite(*k3)) return std::nullopt;
  const std::optional<StateN<N>> k4 = rhs(combine<N, 1>(s, dt, {&*k3}, {1.0}));
  if (!k4 || !detail::all_finite(*k4)) return std::nullopt;
  StateN<N> out =
      combine<N, 4>(s, dt / 6.0, {&*k1, &*k2, &*k3, &*k4}, {1.0, 2.0, 2.0, 1.0});
  if (!detail::all_finite(out)) return std::nullopt;
  return out;
}

template <std::size_t N>
struct Rkf45Trial {
  StateN<N> next;   // fifth-order solution (local extrapolation)
  StateN<N> error;  // fifth minus fourth order
};

/// One Runge-Kutta-Fehlberg 4(5) trial step.
template <std::size_t N, class Rhs>
std::optional<Rkf45Trial<N>> step_rkf45(Rhs&& rhs, const StateN<N>& s, double h) {
  using detail::combine;
  auto eval = [&](const StateN<N>& x) -> std::optional<StateN<N>> {
    if (!detail::all_finite(x)) return std::nullopt;
    auto r = rhs(x);
    if (!r || !detail::all_finite(*r)) return std::nullopt;
    return r;
  };
  const auto k1 = eval(s);
  if (!k1) return std::nullopt;
  const auto k2 = eval(combine<N, 1>(s, h, {&*k1}, {1.0 / 4.0}));
  if (!k2) return std::nullopt;
  const auto k3 = eval(combine<N, 2>(s, h, {&*k1, &*k2}, {3.0 / 32.0, 9.0 / 32.0}));
  if (!k3) return std::nullopt;
  const auto k4 = eval(combine<N, 3>(s, h, {&*k1, &*k2, &*k3},
                                     {1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0}));
  if (!k4) return std::nullopt;
  const auto k5 = eval(combine<N, 4>(s, h, {&*k1, &*k2, &*k3, &*k4},
                                     {439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0}));
  if (!k5) return std::nullopt;
  const auto k6 = eval(combine<N, 5>(
      s, h, {&*k1, &*k2, &*k3, &*k4, &*k5},
      {-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0}));
  if (!k6) return std::nullopt;

  const std::array<const StateN<N>*, 6> k{&*k1, &*k2, &*k3, &*k4, &*k5, &*k6};
  const std::array<double, 6> b5{16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0,
                                 -9.0 / 50.0, 2.0 / 55.0};
  const std::array<double, 6> db{16.0 / 135.0 - 25.0 / 216.0,
                                 0.0,
                                 6656.0 / 12825.0 - 1408.0 / 2565.0,
                                 28561.0 / 56430.0 - 2197.0 / 4104.0,
                                 -9.0 / 50.0 + 1.0 / 5.0,
                                 2.0 / 55.0};
  Rkf45Trial<N> trial;
  trial.next = combine<N, 6>(s, h, k, b5);
  trial.error = combine<N, 6>(StateN<N>{}, h, k, db);
  if (!detail::all_finite(trial.next) || !detail::all_finite(trial.error)) return std::nullopt;
  return trial;
}

}  // namespace npi
