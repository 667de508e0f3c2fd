#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kmedyn/uncertainty.hpp"

using namespace kmedyn;

namespace {

VectorXd vec1(double v) { return VectorXd::Constant(1, v); }
MatrixXd mat1(double v) { return MatrixXd::Constant(1, 1, v); }

UncertaintySpec bimodal() {
  return UncertaintySpec::gmm({{0.6, vec1(-1.0), mat1(0.09)}, {0.4, vec1(2.0), mat1(0.25)}});
}

}  // namespace

TEST_CASE("construction validates the laws") {
  CHECK_THROWS_AS(UncertaintySpec::gmm({{0.5, vec1(0), mat1(1)}, {0.6, vec1(1), mat1(1)}}),
                  Error);  // weights sum to 1.1
  CHECK_THROWS_AS(UncertaintySpec::gmm({{-0.1, vec1(0), mat1(1)}, {1.1, vec1(1), mat1(1)}}),
                  Error);
  CHECK_THROWS_AS(UncertaintySpec::gaussian(vec1(0), mat1(-1.0)), Error);
  MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.1, 1;
  CHECK_THROWS_AS(UncertaintySpec::gaussian(VectorXd::Zero(2), asym), Error);
  CHECK_THROWS_AS(UncertaintySpec::uniform_box(vec1(1), vec1(1)), Error);
  CHECK_THROWS_AS(UncertaintySpec::ellipsoid(VectorXd::Zero(2), -MatrixXd::Identity(2, 2)),
                  Error);
  // semidefinite covariance (a point mass) is fine
  CHECK_NOTHROW(UncertaintySpec::gaussian(vec1(3), mat1(0.0)));
}

TEST_CASE("sampling is reproducible bit for bit") {
  const UncertaintySpec spec = bimodal();
  const PointSet a = sample(spec, 257, RngSeed{7});
  const PointSet b = sample(spec, 257, RngSeed{7});
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  const PointSet c = sample(spec, 257, RngSeed{8});
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("smaller batches are a prefix of larger ones") {
  const UncertaintySpec spec = bimodal();
  const PointSet big = sample(spec, 100, RngSeed{11});
  const PointSet small = sample(spec, 10, RngSeed{11});
  CHECK((big.topRows(10) - small).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gaussian sample mean concentrates") {
  const UncertaintySpec g = UncertaintySpec::gaussian(vec1(0.0), mat1(1.0));
  const PointSet draws = sample(g, 100000, RngSeed{42});
  CHECK(std::abs(draws.col(0).mean()) <= 0.02);  // ~3/sqrt(n) with slack
}

TEST_CASE("point mass gaussian") {
  const UncertaintySpec g = UncertaintySpec::gaussian(vec1(1.5), mat1(0.0));
  const PointSet draws = sample(g, 50, RngSeed{1});
  CHECK((draws.array() - 1.5).abs().maxCoeff() == 0.0);
}

TEST_CASE("ellipsoid draws stay inside the support") {
  const UncertaintySpec e = UncertaintySpec::ellipsoid(VectorXd::Zero(2), MatrixXd::Identity(2, 2));
  const PointSet draws = sample(e, 10000, RngSeed{3});
  CHECK(draws.rowwise().norm().maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("ellipsoid draws are uniform in the ball") {
  // For the unit disk, P(|x| <= r) = r^2.
  const UncertaintySpec e = UncertaintySpec::ellipsoid(VectorXd::Zero(2), MatrixXd::Identity(2, 2));
  const PointSet draws = sample(e, 100000, RngSeed{5});
  const double frac = double((draws.rowwise().norm().array() <= 0.5).count()) / 100000.0;
  CHECK(std::abs(frac - 0.25) <= 0.02);
}

TEST_CASE("linear drift shifts the support") {
  const UncertaintySpec w =
      UncertaintySpec::uniform_box(vec1(-0.5), vec1(0.5)).with_linear_drift(vec1(0.1));
  const PointSet draws = sample(w, 1000, RngSeed{9}, 3.0);
  CHECK(draws.minCoeff() >= -0.2);
  CHECK(draws.maxCoeff() <= 0.8);
  // without the shift argument the base support applies
  const PointSet base = sample(w, 1000, RngSeed{9});
  CHECK(base.minCoeff() >= -0.5);
  CHECK(base.maxCoeff() <= 0.5);
}

TEST_CASE("anisotropic ellipsoid respects its shape") {
  MatrixXd Z(2, 2);
  Z << 0.04, 0.0, 0.0, 1.0;
  const UncertaintySpec e = UncertaintySpec::ellipsoid(VectorXd::Zero(2), Z);
  const PointSet draws = sample(e, 20000, RngSeed{12});
  // Mahalanobis radius stays within 1.
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    const double m = draws(i, 0) * draws(i, 0) / 0.04 + draws(i, 1) * draws(i, 1);
    CHECK(m <= 1.0 + 1e-9);
  }
  CHECK(draws.col(0).cwiseAbs().maxCoeff() <= 0.2 + 1e-9);
  CHECK(draws.col(1).cwiseAbs().maxCoeff() > 0.5);  // long axis actually explored
}

TEST_CASE("moment matching: hand-computed two-component case") {
  const UncertaintySpec g =
      moment_match_gaussian(UncertaintySpec::gmm({{0.5, vec1(-1), mat1(1)}, {0.5, vec1(1), mat1(1)}}));
  const auto& law = std::get<GaussianLaw>(g.law);
  CHECK(law.mean[0] == doctest::Approx(0.0));
  CHECK(law.cov(0, 0) == doctest::Approx(2.0));  // 0.5(1+1)+0.5(1+1)-0
}

TEST_CASE("moment matching: identity on single components") {
  const UncertaintySpec g = moment_match_gaussian(UncertaintySpec::gmm({{1.0, vec1(3), mat1(4)}}));
  const auto& law = std::get<GaussianLaw>(g.law);
  CHECK(law.mean[0] == doctest::Approx(3.0));
  CHECK(law.cov(0, 0) == doctest::Approx(4.0));
}

TEST_CASE("moment matching rejects unsupported inputs") {
  CHECK_THROWS_AS(moment_match_gaussian(UncertaintySpec::gaussian(vec1(0), mat1(1))), Error);
  const UncertaintySpec mv = UncertaintySpec::gmm(
      {{1.0, VectorXd::Zero(2), MatrixXd::Identity(2, 2)}});
  CHECK_THROWS_AS(moment_match_gaussian(mv), Error);
  // degenerate: a single point mass has zero matched variance
  CHECK_THROWS_AS(moment_match_gaussian(UncertaintySpec::gmm({{1.0, vec1(2), mat1(0.0)}})), Error);
}

TEST_CASE("matched gaussian reproduces the first two empirical moments") {
  const UncertaintySpec mix = bimodal();
  const UncertaintySpec matched = moment_match_gaussian(mix);
  const int n = 1000000;
  const PointSet a = sample(mix, n, RngSeed{100});
  const PointSet b = sample(matched, n, RngSeed{101});

  const double m1a = a.col(0).mean(), m1b = b.col(0).mean();
  const double m2a = a.col(0).array().square().mean(), m2b = b.col(0).array().square().mean();
  const double tol = 5.0 / std::sqrt(double(n)) * std::max(1.0, m2a);
  CHECK(std::abs(m1a - m1b) <= tol);
  CHECK(std::abs(m2a - m2b) <= tol);
}
