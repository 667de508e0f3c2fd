#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "kmedyn/common.hpp"
#include "kmedyn/rng.hpp"

namespace kmedyn {

/// Multivariate normal. `factor` satisfies factor * factor' = cov and is
/// precomputed at construction; positive semidefinite covariances (including
/// zero, a point mass) are accepted, indefinite ones rejected.
struct GaussianLaw {
  VectorXd mean;
  MatrixXd cov;
  MatrixXd factor;
};

struct GmmComponent {
  double weight;
  VectorXd mean;
  MatrixXd cov;
  MatrixXd factor;
};

struct GmmLaw {
  std::vector<GmmComponent> components;
};

struct UniformBoxLaw {
  VectorXd lower;
  VectorXd upper;
};

/// Uniform over the solid ellipsoid { center + L u : |u| <= 1 }, shape = L L'.
struct EllipsoidLaw {
  VectorXd center;
  MatrixXd shape;
  MatrixXd factor;
};

/// Tagged sampler description. Usable as a constant parameter law or, with a
/// time shift attached, as a per-step process law (the shift is added after
/// the base draw).
struct UncertaintySpec {
  using Law = std::variant<GaussianLaw, GmmLaw, UniformBoxLaw, EllipsoidLaw>;

  Law law;
  std::function<VectorXd(double)> time_shift;  // optional; null = none
  /// Set by with_linear_drift; lets configs round-trip the shift. A custom
  /// time_shift without it cannot be serialized.
  std::optional<VectorXd> linear_drift_rate;

  static UncertaintySpec gaussian(VectorXd mean, MatrixXd cov);
  static UncertaintySpec gmm(std::vector<std::tuple<double, VectorXd, MatrixXd>> components);
  static UncertaintySpec uniform_box(VectorXd lower, VectorXd upper);
  static UncertaintySpec ellipsoid(VectorXd center, MatrixXd shape);

  int dim() const;

  /// Attach a linear drift: shift(t) = rate * t.
  UncertaintySpec with_linear_drift(VectorXd rate) const;
};

/// n i.i.d. draws, one per row. Deterministic per (spec, n, seed): the stream
/// is derived from the seed alone, so distinct substreams stay independent.
PointSet sample(const UncertaintySpec& spec, int n, RngSeed seed, double t = 0.0);

/// Gaussian matching the first two raw moments of a scalar mixture:
/// m = sum w_i m_i, var = sum w_i (var_i + m_i^2) - m^2.
UncertaintySpec moment_match_gaussian(const UncertaintySpec& gmm);

/// Mean (first raw moment) of the law, ignoring any time shift.
VectorXd law_mean(const UncertaintySpec& spec);

}  // namespace kmedyn
