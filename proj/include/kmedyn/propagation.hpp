#pragma once

#include <optional>
#include <vector>

#include "kmedyn/dynamics.hpp"
#include "kmedyn/embedding.hpp"
#include "kmedyn/rng.hpp"

namespace kmedyn {

/// Settings for the recursive reduced-set propagation.
struct ReducedSetConfig {
  enum class Selection { SubsampleUniform, WeightProportional };

  int target_size = 10;          // expansion size kept after each step
  int noise_draws_per_step = 10; // fresh process-noise draws per step
  /// Ridge for the weight solve; absent picks 1e-8 * trace(K_ZZ) / target_size
  /// (propagated point clouds carry near-duplicates, so the plain system is
  /// often numerically singular).
  std::optional<double> ridge;
  Selection selection = Selection::SubsampleUniform;
};

/// Monte Carlo push-through: draw N uncertainty realizations and evolve each
/// deterministically. The constant parameter of a continuous system is drawn
/// once per realization; a discrete system consumes one fresh noise path per
/// realization, pairing the i-th draw of every step with the i-th path.
TrajectoryEnsemble propagate_direct(const ContinuousSystem& sys, const VectorXd& x0,
                                    const UncertaintySpec& param_law, int n, RngSeed seed);
TrajectoryEnsemble propagate_direct(const DiscreteSystem& sys, const VectorXd& x0, int n,
                                    RngSeed seed);

/// Variant with caller-supplied parameter realizations (one per row), for
/// runs that need the draws themselves (histograms, paired comparisons).
TrajectoryEnsemble propagate_direct(const ContinuousSystem& sys, const VectorXd& x0,
                                    const PointSet& params);

/// One expansion step: maps every current point through the dynamics under
/// every noise draw (the same draw set for all points) and divides each weight
/// by the number of draws, so total weight mass is preserved.
Expansion ustat_step(const Expansion& current, const DiscreteSystem& sys, int t,
                     const PointSet& noise_draws);
Expansion ustat_step(const Expansion& current, const DiscreteSystem& sys, int t, int n_xi,
                     RngSeed seed);

/// Shrinks an expansion to target_size points: selects points from the full
/// set (uniform subsampling by default), then solves
///     (K_ZZ + ridge I) alpha = K_ZF beta
/// for the new weights - the exact minimizer of the RKHS residual over
/// weights for the chosen points when ridge = 0. A singular solve at ridge = 0
/// is retried once with 1e-10 before failing. Absent ridge uses the
/// ReducedSetConfig default.
Expansion reduce(const Expansion& full, int target_size, std::optional<double> ridge,
                 RngSeed seed,
                 ReducedSetConfig::Selection selection = ReducedSetConfig::Selection::SubsampleUniform);

/// Recursive reduced-set propagation: starting from the singleton expansion
/// {(x0, 1)}, alternates ustat_step and reduce for `horizon` steps. Returns
/// horizon+1 expansions (including the initial one); none exceeds
/// cfg.target_size points.
std::vector<Expansion> propagate_reduced(const DiscreteSystem& sys, const VectorXd& x0,
                                         const ReducedSetConfig& cfg, int horizon,
                                         const KernelSpec& kernel, RngSeed seed);

/// Squared RKHS distance of a candidate expansion to a reference one (same
/// kernel required).
double approximation_error(const Expansion& candidate, const Expansion& reference);

}  // namespace kmedyn
