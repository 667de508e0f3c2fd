#pragma once

#include <vector>

#include "kmedyn/common.hpp"
#include "kmedyn/kernels.hpp"

namespace kmedyn {

struct TrajectoryEnsemble;

/// A finite weighted kernel expansion sum_i w_i k(x_i, .) standing in for an
/// embedded distribution. Weights may be signed and need not sum to one;
/// reduced-set weights typically are signed.
struct Expansion {
  KernelSpec kernel;
  PointSet points;   // N x d, one expansion point per row
  VectorXd weights;  // N
};

/// Validating constructor: at least one point, finite entries, matching sizes.
Expansion make_expansion(KernelSpec kernel, PointSet points, VectorXd weights);

/// Expansion with uniform weights 1/N over the given samples.
Expansion embed_uniform(const PointSet& samples, const KernelSpec& kernel);
Expansion embed_uniform(const std::vector<VectorXd>& samples, const KernelSpec& kernel);

/// Squared RKHS distance |mu_a - mu_b|^2 between two expansions over the same
/// kernel:
///     a' K_aa a - 2 a' K_ab b + b' K_bb b.
/// Cancellation can push the value slightly negative; negative results are
/// clamped to zero, with a warning on stderr below -1e-9 (a conditioning
/// signal).
double rkhs_dist_sq(const Expansion& a, const Expansion& b);

/// Squared RKHS norm w' K w of a single expansion.
double rkhs_norm_sq(const Expansion& a);

/// Cross term a' K_ab b. Exposed so callers comparing many expansions against
/// one fixed reference can cache the reference's norm.
double rkhs_cross(const Expansion& a, const Expansion& b);

struct TimeDistance {
  double time;
  double value;
};

/// RKHS distance (square root, not squared) between the two ensembles'
/// embedded state distributions at each shared time point. Ensembles must be
/// on identical time grids. Ensemble weights are honored when present,
/// otherwise slices embed uniformly.
std::vector<TimeDistance> mmd_over_time(const TrajectoryEnsemble& a,
                                        const TrajectoryEnsemble& b,
                                        const KernelSpec& kernel);

}  // namespace kmedyn
