#include "kmedyn/dynamics.hpp"

#include <cmath>
#include <complex>

namespace kmedyn {

namespace {

constexpr double kBlowupNorm = 1e12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_state(const VectorXd& x, double time, const char* what) {
  if (!x.allFinite() || x.norm() > kBlowupNorm)
    throw BlowupError(std::string(what) + ": state blew up at time " + std::to_string(time),
                      time);
}

long grid_steps(const ContinuousSystem& sys) {
  require(std::isfinite(sys.step) && sys.step > 0.0, "integrate: step must be positive");
  const double span = sys.t_end - sys.t0;
  require(std::isfinite(span) && span > 0.0, "integrate: t_end must be after t0");
  const long n = std::lround(span / sys.step);
  require(n >= 1 && std::abs(double(n) * sys.step - span) <= 1e-9 * std::max(1.0, std::abs(span)),
          "integrate: (t_end - t0) / step must be a whole number of steps");
  return n;
}

}  // namespace

void validate(const TrajectoryEnsemble& ens) {
  require(!ens.times.empty(), "ensemble: no time points");
  require(ens.states.size() == ens.times.size(), "ensemble: states/times length mismatch");
  const Eigen::Index n = ens.states.front().rows();
  for (const auto& slice : ens.states)
    require(slice.rows() == n, "ensemble: time slices have different realization counts");
  if (ens.weights)
    require(ens.weights->size() == n, "ensemble: weight count does not match realizations");
}

Trajectory integrate(const ContinuousSystem& sys, const VectorXd& x0, const VectorXd& xi) {
  require(bool(sys.rhs), "integrate: system has no rhs");
  require(x0.size() >= 1 && x0.allFinite(), "integrate: invalid initial state");
  require(xi.allFinite(), "integrate: non-finite uncertainty realization");
  const long n = grid_steps(sys);
  const double h = sys.step;
  const Eigen::Index d = x0.size();

  auto deriv = [&](double t, const VectorXd& x) {
    VectorXd v = sys.rhs(t, x, xi);
    require(v.size() == d, "integrate: rhs returned wrong dimension");
    return v;
  };

  Trajectory traj;
  traj.times.resize(std::size_t(n) + 1);
  traj.states.resize(n + 1, d);
  VectorXd x = x0;
  traj.times[0] = sys.t0;
  traj.states.row(0) = x.transpose();

  for (long i = 0; i < n; ++i) {
    const double t = sys.t0 + double(i) * h;
    if (sys.method == IntegrationMethod::Euler) {
      x += h * deriv(t, x);
    } else {
      VectorXd k1 = deriv(t, x);
      VectorXd k2 = deriv(t + 0.5 * h, x + (0.5 * h) * k1);
      VectorXd k3 = deriv(t + 0.5 * h, x + (0.5 * h) * k2);
      VectorXd k4 = deriv(t + h, x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const double t_next = sys.t0 + double(i + 1) * h;
    check_state(x, t_next, "integrate");
    traj.times[std::size_t(i) + 1] = t_next;
    traj.states.row(i + 1) = x.transpose();
  }
  return traj;
}

Trajectory iterate(const DiscreteSystem& sys, const VectorXd& x0, const PointSet& noise_path) {
  require(bool(sys.map), "iterate: system has no map");
  require(sys.horizon >= 1, "iterate: horizon must be >= 1");
  require(x0.size() >= 1 && x0.allFinite(), "iterate: invalid initial state");
  require(noise_path.rows() == sys.horizon,
          "iterate: noise path length " + std::to_string(noise_path.rows()) +
              " != horizon " + std::to_string(sys.horizon));
  require(noise_path.allFinite(), "iterate: non-finite noise path");
  const Eigen::Index d = x0.size();

  Trajectory traj;
  traj.times.resize(std::size_t(sys.horizon) + 1);
  traj.states.resize(sys.horizon + 1, d);
  VectorXd x = x0;
  traj.times[0] = 0.0;
  traj.states.row(0) = x.transpose();

  for (int t = 0; t < sys.horizon; ++t) {
    VectorXd next = sys.map(t, x, noise_path.row(t).transpose());
    require(next.size() == d, "iterate: map returned wrong dimension");
    x = std::move(next);
    check_state(x, double(t + 1), "iterate");
    traj.times[std::size_t(t) + 1] = double(t + 1);
    traj.states.row(t + 1) = x.transpose();
  }
  return traj;
}

ContinuousSystem make_linear_ode(double t0, double t_end, double step, IntegrationMethod method) {
  ContinuousSystem sys;
  sys.rhs = [](double, const VectorXd& x, const VectorXd& xi) -> VectorXd { return xi[0] * x; };
  sys.t0 = t0;
  sys.t_end = t_end;
  sys.step = step;
  sys.method = method;
  return sys;
}

DiscreteSystem make_random_walk(int horizon, UncertaintySpec noise) {
  DiscreteSystem sys;
  sys.map = [](int, const VectorXd& x, const VectorXd& w) -> VectorXd { return x + w; };
  sys.horizon = horizon;
  sys.noise = std::move(noise);
  return sys;
}

DiscreteSystem make_arx(double a1, std::function<double(int)> input, int horizon,
                        UncertaintySpec noise, bool redraw_each_step) {
  require(bool(input), "arx: input function is required");
  require(noise.dim() == 2, "arx: parameter law must be two-dimensional (a2, b1)");
  DiscreteSystem sys;
  sys.map = [a1, input](int t, const VectorXd& s, const VectorXd& w) -> VectorXd {
    VectorXd next(2);
    next[0] = a1 * s[0] + w[0] * s[1] + w[1] * input(t);
    next[1] = s[0];
    return next;
  };
  sys.horizon = horizon;
  sys.noise = std::move(noise);
  sys.redraw_each_step = redraw_each_step;
  return sys;
}

void validate_arx_stability(double a1, const UncertaintySpec& param_law) {
  require(param_law.dim() == 2, "arx stability: parameter law must be two-dimensional");

  // Spectral radius of [[a1, a2], [1, 0]]: roots of z^2 - a1 z - a2.
  auto radius = [a1](double a2) {
    const std::complex<double> disc = std::sqrt(std::complex<double>(a1 * a1 + 4.0 * a2, 0.0));
    return std::max(std::abs((a1 + disc) / 2.0), std::abs((a1 - disc) / 2.0));
  };

  std::vector<VectorXd> probes;
  probes.push_back(law_mean(param_law));
  const int kAngles = 64;
  std::visit(overloaded{
                 [&](const GaussianLaw& l) {
                   // 3-sigma shell.
                   for (int i = 0; i < kAngles; ++i) {
                     const double a = 2.0 * M_PI * double(i) / kAngles;
                     VectorXd u(2);
                     u << std::cos(a), std::sin(a);
                     probes.push_back(l.mean + 3.0 * (l.factor * u));
                   }
                 },
                 [&](const GmmLaw& l) {
                   for (const auto& c : l.components)
                     for (int i = 0; i < kAngles; ++i) {
                       const double a = 2.0 * M_PI * double(i) / kAngles;
                       VectorXd u(2);
                       u << std::cos(a), std::sin(a);
                       probes.push_back(c.mean + 3.0 * (c.factor * u));
                     }
                 },
                 [&](const UniformBoxLaw& l) {
                   for (int mask = 0; mask < 4; ++mask) {
                     VectorXd v(2);
                     v << (mask & 1 ? l.upper[0] : l.lower[0]),
                         (mask & 2 ? l.upper[1] : l.lower[1]);
                     probes.push_back(v);
                   }
                 },
                 [&](const EllipsoidLaw& l) {
                   for (int i = 0; i < kAngles; ++i) {
                     const double a = 2.0 * M_PI * double(i) / kAngles;
                     VectorXd u(2);
                     u << std::cos(a), std::sin(a);
                     probes.push_back(l.center + l.factor * u);
                   }
                 }},
             param_law.law);

  for (const auto& p : probes) {
    const double r = radius(p[0]);
    require(r < 1.0, "arx stability: spectral radius " + std::to_string(r) +
                         " >= 1 at parameter (" + std::to_string(p[0]) + ", " +
                         std::to_string(p[1]) + ")");
  }
}

}  // namespace kmedyn
