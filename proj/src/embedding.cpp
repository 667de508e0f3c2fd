#include "kmedyn/embedding.hpp"

#include <cmath>
#include <iostream>

#include "kmedyn/dynamics.hpp"

namespace kmedyn {

namespace {

double clamp_nonneg(double v, const char* what) {
  if (v >= 0.0) return v;
  if (v < -1e-9)
    std::cerr << "[kmedyn] warning: " << what << " = " << v
              << " clamped to 0; Gram matrix is badly conditioned\n";
  return 0.0;
}

void check_pair(const Expansion& a, const Expansion& b, const char* what) {
  require(a.kernel == b.kernel, std::string(what) + ": kernel mismatch (" + a.kernel.label() +
                                    " vs " + b.kernel.label() + ")");
  require(a.points.cols() == b.points.cols(),
          std::string(what) + ": point dimension mismatch");
}

}  // namespace

Expansion make_expansion(KernelSpec kernel, PointSet points, VectorXd weights) {
  require(points.rows() >= 1, "expansion: needs at least one point");
  require(points.allFinite(), "expansion: non-finite point coordinates");
  require(weights.size() == points.rows(),
          "expansion: weight count " + std::to_string(weights.size()) + " != point count " +
              std::to_string(points.rows()));
  require(weights.allFinite(), "expansion: non-finite weights");
  return Expansion{std::move(kernel), std::move(points), std::move(weights)};
}

Expansion embed_uniform(const PointSet& samples, const KernelSpec& kernel) {
  require(samples.rows() >= 1, "embed_uniform: empty sample set");
  const Eigen::Index n = samples.rows();
  return make_expansion(kernel, samples, VectorXd::Constant(n, 1.0 / double(n)));
}

Expansion embed_uniform(const std::vector<VectorXd>& samples, const KernelSpec& kernel) {
  require(!samples.empty(), "embed_uniform: empty sample set");
  const Eigen::Index d = samples.front().size();
  PointSet pts(Eigen::Index(samples.size()), d);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    require(samples[i].size() == d, "embed_uniform: mixed point dimensions (" +
                                        std::to_string(samples[i].size()) + " vs " +
                                        std::to_string(d) + ")");
    pts.row(Eigen::Index(i)) = samples[i].transpose();
  }
  return embed_uniform(pts, kernel);
}

double rkhs_dist_sq(const Expansion& a, const Expansion& b) {
  check_pair(a, b, "rkhs_dist_sq");
  // Identical expansions embed to the same element exactly; skip the quadratic
  // form, whose cancellation noise scales with the kernel magnitude.
  if (a.points.rows() == b.points.rows() && a.points == b.points && a.weights == b.weights)
    return 0.0;
  const double aa = weighted_gram_sum(a.kernel, a.points, a.weights);
  const double bb = weighted_gram_sum(b.kernel, b.points, b.weights);
  const double ab = weighted_gram_sum(a.kernel, a.points, a.weights, b.points, b.weights);
  return clamp_nonneg(aa - 2.0 * ab + bb, "rkhs_dist_sq");
}

double rkhs_norm_sq(const Expansion& a) {
  return clamp_nonneg(weighted_gram_sum(a.kernel, a.points, a.weights), "rkhs_norm_sq");
}

double rkhs_cross(const Expansion& a, const Expansion& b) {
  check_pair(a, b, "rkhs_cross");
  return weighted_gram_sum(a.kernel, a.points, a.weights, b.points, b.weights);
}

std::vector<TimeDistance> mmd_over_time(const TrajectoryEnsemble& a,
                                        const TrajectoryEnsemble& b,
                                        const KernelSpec& kernel) {
  require(a.times.size() == b.times.size(),
          "mmd_over_time: ensembles have different numbers of time points");
  for (std::size_t t = 0; t < a.times.size(); ++t)
    require(a.times[t] == b.times[t], "mmd_over_time: time grids differ at index " +
                                          std::to_string(t));

  std::vector<TimeDistance> out;
  out.reserve(a.times.size());
  for (std::size_t t = 0; t < a.times.size(); ++t) {
    Expansion ea = a.weights ? make_expansion(kernel, a.states[t], *a.weights)
                             : embed_uniform(a.states[t], kernel);
    Expansion eb = b.weights ? make_expansion(kernel, b.states[t], *b.weights)
                             : embed_uniform(b.states[t], kernel);
    out.push_back({a.times[t], std::sqrt(rkhs_dist_sq(ea, eb))});
  }
  return out;
}

}  // namespace kmedyn
