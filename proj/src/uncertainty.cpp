#include "kmedyn/uncertainty.hpp"

#include <cmath>
#include <numeric>

namespace kmedyn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Factor L with L L' = m for a symmetric positive semidefinite matrix.
// Rejects asymmetric or indefinite input. Eigendecomposition rather than
// Cholesky so that semidefinite laws (point masses, flat ellipsoids) load.
MatrixXd psd_factor(const MatrixXd& m, const std::string& what) {
  require(m.rows() == m.cols(), what + ": matrix must be square");
  require(m.allFinite(), what + ": non-finite matrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          what + ": matrix must be symmetric");

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  require(es.info() == Eigen::Success, what + ": eigendecomposition failed");
  VectorXd evals = es.eigenvalues();
  require(evals.minCoeff() >= -1e-12 * scale,
          what + ": matrix is not positive semidefinite (min eigenvalue " +
              std::to_string(evals.minCoeff()) + ")");
  return es.eigenvectors() * evals.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

void fill_standard_normal(std::mt19937_64& rng, Eigen::Ref<VectorXd> z) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
}

}  // namespace

UncertaintySpec UncertaintySpec::gaussian(VectorXd mean, MatrixXd cov) {
  require(mean.size() >= 1 && mean.allFinite(), "gaussian law: invalid mean");
  require(cov.rows() == mean.size(), "gaussian law: covariance size does not match mean");
  MatrixXd factor = psd_factor(cov, "gaussian law covariance");
  return UncertaintySpec{GaussianLaw{std::move(mean), std::move(cov), std::move(factor)}, nullptr};
}

UncertaintySpec UncertaintySpec::gmm(std::vector<std::tuple<double, VectorXd, MatrixXd>> components) {
  require(!components.empty(), "gmm law: needs at least one component");
  GmmLaw law;
  double total = 0.0;
  const Eigen::Index d = std::get<1>(components.front()).size();
  for (auto& [w, mean, cov] : components) {
    require(std::isfinite(w) && w > 0.0, "gmm law: component weights must be positive");
    require(mean.size() == d, "gmm law: components have mixed dimensions");
    require(mean.allFinite(), "gmm law: invalid component mean");
    require(cov.rows() == d, "gmm law: covariance size does not match mean");
    MatrixXd factor = psd_factor(cov, "gmm component covariance");
    law.components.push_back({w, std::move(mean), std::move(cov), std::move(factor)});
    total += w;
  }
  require(std::abs(total - 1.0) <= 1e-12,
          "gmm law: component weights sum to " + std::to_string(total) + ", expected 1");
  return UncertaintySpec{std::move(law), nullptr};
}

UncertaintySpec UncertaintySpec::uniform_box(VectorXd lower, VectorXd upper) {
  require(lower.size() >= 1 && lower.size() == upper.size(), "uniform box: bound size mismatch");
  require(lower.allFinite() && upper.allFinite(), "uniform box: non-finite bounds");
  require((lower.array() < upper.array()).all(),
          "uniform box: lower bound must be strictly below upper bound componentwise");
  return UncertaintySpec{UniformBoxLaw{std::move(lower), std::move(upper)}, nullptr};
}

UncertaintySpec UncertaintySpec::ellipsoid(VectorXd center, MatrixXd shape) {
  require(center.size() >= 1 && center.allFinite(), "ellipsoid law: invalid center");
  require(shape.rows() == center.size(), "ellipsoid law: shape size does not match center");
  MatrixXd factor = psd_factor(shape, "ellipsoid shape");
  return UncertaintySpec{EllipsoidLaw{std::move(center), std::move(shape), std::move(factor)}, nullptr};
}

int UncertaintySpec::dim() const {
  return int(std::visit(
      overloaded{[](const GaussianLaw& l) { return l.mean.size(); },
                 [](const GmmLaw& l) { return l.components.front().mean.size(); },
                 [](const UniformBoxLaw& l) { return l.lower.size(); },
                 [](const EllipsoidLaw& l) { return l.center.size(); }},
      law));
}

UncertaintySpec UncertaintySpec::with_linear_drift(VectorXd rate) const {
  require(rate.size() == dim(), "drift: rate dimension does not match law");
  require(rate.allFinite(), "drift: non-finite rate");
  UncertaintySpec out = *this;
  out.time_shift = [rate](double t) -> VectorXd { return rate * t; };
  out.linear_drift_rate = std::move(rate);
  return out;
}

PointSet sample(const UncertaintySpec& spec, int n, RngSeed seed, double t) {
  require(n >= 1, "sample: n must be >= 1");
  const int d = spec.dim();
  PointSet out(n, d);
  std::mt19937_64 rng = make_rng(seed);
  VectorXd z(d);

  std::visit(overloaded{
                 [&](const GaussianLaw& l) {
                   for (int i = 0; i < n; ++i) {
                     fill_standard_normal(rng, z);
                     out.row(i) = (l.mean + l.factor * z).transpose();
                   }
                 },
                 [&](const GmmLaw& l) {
                   std::uniform_real_distribution<double> unit(0.0, 1.0);
                   for (int i = 0; i < n; ++i) {
                     double u = unit(rng);
                     std::size_t c = 0;
                     double acc = l.components[0].weight;
                     while (c + 1 < l.components.size() && u > acc) {
                       ++c;
                       acc += l.components[c].weight;
                     }
                     fill_standard_normal(rng, z);
                     out.row(i) = (l.components[c].mean + l.components[c].factor * z).transpose();
                   }
                 },
                 [&](const UniformBoxLaw& l) {
                   std::uniform_real_distribution<double> unit(0.0, 1.0);
                   for (int i = 0; i < n; ++i)
                     for (int j = 0; j < d; ++j)
                       out(i, j) = l.lower[j] + (l.upper[j] - l.lower[j]) * unit(rng);
                 },
                 [&](const EllipsoidLaw& l) {
                   // Uniform over the solid ball: Gaussian direction, radius
                   // U^(1/d), then mapped through the shape factor.
                   std::uniform_real_distribution<double> unit(0.0, 1.0);
                   for (int i = 0; i < n; ++i) {
                     do {
                       fill_standard_normal(rng, z);
                     } while (z.norm() == 0.0);
                     const double r = std::pow(unit(rng), 1.0 / double(d));
                     out.row(i) = (l.center + l.factor * (z * (r / z.norm()))).transpose();
                   }
                 }},
             spec.law);

  if (spec.time_shift) {
    VectorXd shift = spec.time_shift(t);
    require(shift.size() == d, "sample: time shift dimension does not match law");
    out.rowwise() += shift.transpose();
  }
  return out;
}

UncertaintySpec moment_match_gaussian(const UncertaintySpec& spec) {
  const auto* l = std::get_if<GmmLaw>(&spec.law);
  require(l != nullptr, "moment_match_gaussian: input must be a Gaussian mixture");
  require(spec.dim() == 1, "moment_match_gaussian: only scalar mixtures are supported");

  double m = 0.0, second = 0.0;
  for (const auto& c : l->components) {
    m += c.weight * c.mean[0];
    second += c.weight * (c.cov(0, 0) + c.mean[0] * c.mean[0]);
  }
  const double var = second - m * m;
  require(var > 0.0, "moment_match_gaussian: matched variance is not positive (" +
                         std::to_string(var) + ")");

  UncertaintySpec out = UncertaintySpec::gaussian(VectorXd::Constant(1, m),
                                                  MatrixXd::Constant(1, 1, var));
  out.time_shift = spec.time_shift;
  out.linear_drift_rate = spec.linear_drift_rate;
  return out;
}

VectorXd law_mean(const UncertaintySpec& spec) {
  return std::visit(overloaded{[](const GaussianLaw& l) { return l.mean; },
                               [](const GmmLaw& l) {
                                 VectorXd m = VectorXd::Zero(l.components.front().mean.size());
                                 for (const auto& c : l.components) m += c.weight * c.mean;
                                 return m;
                               },
                               [](const UniformBoxLaw& l) {
                                 return VectorXd(0.5 * (l.lower + l.upper));
                               },
                               [](const EllipsoidLaw& l) { return l.center; }},
                    spec.law);
}

}  // namespace kmedyn
