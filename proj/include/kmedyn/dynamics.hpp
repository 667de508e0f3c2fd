#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "kmedyn/common.hpp"
#include "kmedyn/uncertainty.hpp"

namespace kmedyn {

enum class IntegrationMethod { Euler, RK4 };

/// Continuous-time model dx/dt = rhs(t, x, xi) on a fixed aligned grid:
/// (t_end - t0) / step must be a whole number of steps.
struct ContinuousSystem {
  std::function<VectorXd(double t, const VectorXd& x, const VectorXd& xi)> rhs;
  double t0 = 0.0;
  double t_end = 1.0;
  double step = 0.01;
  IntegrationMethod method = IntegrationMethod::RK4;
};

/// Discrete-time model x+ = map(t, x, w_t) driven by a per-step noise law.
/// With redraw_each_step = false the noise is drawn once per trajectory and
/// held (parameter-style uncertainty).
struct DiscreteSystem {
  std::function<VectorXd(int t, const VectorXd& x, const VectorXd& w)> map;
  int horizon = 1;
  UncertaintySpec noise;
  bool redraw_each_step = true;
};

/// One realization's path; states holds one row per time point.
struct Trajectory {
  std::vector<double> times;
  MatrixXd states;
};

/// Per-time-index collection of state samples across realizations. weights,
/// when present, are shared across times; absent means uniform.
struct TrajectoryEnsemble {
  std::vector<double> times;
  std::vector<PointSet> states;  // states[t] is N x d
  std::optional<VectorXd> weights;
};

void validate(const TrajectoryEnsemble& ens);

/// Fixed-step integration of a continuous system for one uncertainty
/// realization. Times are t0 + i*step (computed as multiples, not running
/// sums). Throws BlowupError with the failing time if the state leaves the
/// finite range (|x| > 1e12 or non-finite).
Trajectory integrate(const ContinuousSystem& sys, const VectorXd& x0, const VectorXd& xi);

/// Iterates a discrete map along one noise path (one row per step). Returns
/// horizon+1 states including x0.
Trajectory iterate(const DiscreteSystem& sys, const VectorXd& x0, const PointSet& noise_path);

// ---- Built-in systems -------------------------------------------------

/// dx/dt = xi * x with scalar uncertain rate xi.
ContinuousSystem make_linear_ode(double t0, double t_end, double step, IntegrationMethod method);

/// x+ = x + w with additive process noise.
DiscreteSystem make_random_walk(int horizon, UncertaintySpec noise);

/// Second-order output recursion y_k = a1 y_{k-1} + w1 y_{k-2} + w2 u_{k-1}
/// over the state (y_{k-1}, y_{k-2}); w = (w1, w2) is the per-step parameter
/// draw.
DiscreteSystem make_arx(double a1, std::function<double(int)> input, int horizon,
                        UncertaintySpec noise, bool redraw_each_step = true);

/// Checks that the recursion above is stable (companion spectral radius < 1)
/// for every parameter value on a deterministic sample of the law's support
/// boundary (ellipsoid/box vertices, Gaussian mean +- 3 sigma shell). Throws
/// with the offending parameter point.
void validate_arx_stability(double a1, const UncertaintySpec& param_law);

}  // namespace kmedyn
