#include "kmedyn/propagation.hpp"

#include <algorithm>
#include <numeric>

namespace kmedyn {

namespace {

// Noise substream tags so direct and reduced runs with the same root seed do
// not accidentally walk the same stream for different purposes.
constexpr std::uint64_t kTagParams = 0x70;
constexpr std::uint64_t kTagStep = 0x71;
constexpr std::uint64_t kTagReduce = 0x72;

TrajectoryEnsemble from_trajectories(const std::vector<Trajectory>& trajs) {
  TrajectoryEnsemble ens;
  const auto& first = trajs.front();
  ens.times = first.times;
  const Eigen::Index n = Eigen::Index(trajs.size());
  const Eigen::Index d = first.states.cols();
  ens.states.assign(first.times.size(), PointSet(n, d));
  for (Eigen::Index i = 0; i < n; ++i) {
    require(trajs[std::size_t(i)].times == first.times,
            "propagate_direct: realizations produced different time grids");
    for (std::size_t t = 0; t < first.times.size(); ++t)
      ens.states[t].row(i) = trajs[std::size_t(i)].states.row(Eigen::Index(t));
  }
  return ens;
}

[[noreturn]] void rethrow_with_realization(const BlowupError& e, int realization) {
  throw BlowupError(std::string(e.what()) + " (realization " + std::to_string(realization) + ")",
                    e.time(), realization);
}

std::vector<int> pick_indices(const Expansion& full, int target, RngSeed seed,
                              ReducedSetConfig::Selection selection) {
  const int f = int(full.points.rows());
  std::mt19937_64 rng = make_rng(seed);
  std::vector<int> chosen;
  chosen.reserve(std::size_t(target));

  if (selection == ReducedSetConfig::Selection::SubsampleUniform) {
    std::vector<int> idx(static_cast<std::size_t>(f));
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < target; ++k) {  // partial Fisher-Yates
      std::uniform_int_distribution<int> pick(k, f - 1);
      std::swap(idx[std::size_t(k)], idx[std::size_t(pick(rng))]);
      chosen.push_back(idx[std::size_t(k)]);
    }
  } else {
    // Without replacement, probability proportional to |weight|.
    std::vector<double> mass(static_cast<std::size_t>(f));
    for (int i = 0; i < f; ++i) mass[std::size_t(i)] = std::abs(full.weights[i]);
    double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < target; ++k) {
      int sel = -1;
      if (total > 0.0) {
        double u = unit(rng) * total;
        double acc = 0.0;
        for (int i = 0; i < f; ++i) {
          if (mass[std::size_t(i)] == 0.0) continue;
          acc += mass[std::size_t(i)];
          if (u <= acc) {
            sel = i;
            break;
          }
        }
      }
      if (sel < 0) {  // all remaining mass zero: fall back to first unused
        for (int i = 0; i < f; ++i)
          if (mass[std::size_t(i)] >= 0.0 &&
              std::find(chosen.begin(), chosen.end(), i) == chosen.end()) {
            sel = i;
            break;
          }
      }
      total -= mass[std::size_t(sel)];
      mass[std::size_t(sel)] = 0.0;
      chosen.push_back(sel);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

TrajectoryEnsemble propagate_direct(const ContinuousSystem& sys, const VectorXd& x0,
                                    const UncertaintySpec& param_law, int n, RngSeed seed) {
  require(n >= 1, "propagate_direct: n must be >= 1");
  return propagate_direct(sys, x0, sample(param_law, n, substream(seed, kTagParams)));
}

TrajectoryEnsemble propagate_direct(const ContinuousSystem& sys, const VectorXd& x0,
                                    const PointSet& params) {
  require(params.rows() >= 1, "propagate_direct: needs at least one realization");
  std::vector<Trajectory> trajs;
  trajs.reserve(std::size_t(params.rows()));
  for (Eigen::Index i = 0; i < params.rows(); ++i) {
    try {
      trajs.push_back(integrate(sys, x0, params.row(i).transpose()));
    } catch (const BlowupError& e) {
      rethrow_with_realization(e, int(i));
    }
  }
  return from_trajectories(trajs);
}

TrajectoryEnsemble propagate_direct(const DiscreteSystem& sys, const VectorXd& x0, int n,
                                    RngSeed seed) {
  require(n >= 1, "propagate_direct: n must be >= 1");
  require(sys.horizon >= 1, "propagate_direct: horizon must be >= 1");
  const int d_w = sys.noise.dim();

  // Diagonal pairing: path i uses the i-th draw of every step's batch.
  std::vector<PointSet> paths(std::size_t(n), PointSet(sys.horizon, d_w));
  if (sys.redraw_each_step) {
    for (int t = 0; t < sys.horizon; ++t) {
      const PointSet batch =
          sample(sys.noise, n, substream(seed, kTagStep, std::uint64_t(t)), double(t));
      for (int i = 0; i < n; ++i) paths[std::size_t(i)].row(t) = batch.row(i);
    }
  } else {
    const PointSet batch = sample(sys.noise, n, substream(seed, kTagStep, 0), 0.0);
    for (int i = 0; i < n; ++i) paths[std::size_t(i)].rowwise() = batch.row(i);
  }

  std::vector<Trajectory> trajs;
  trajs.reserve(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    try {
      trajs.push_back(iterate(sys, x0, paths[std::size_t(i)]));
    } catch (const BlowupError& e) {
      rethrow_with_realization(e, i);
    }
  }
  return from_trajectories(trajs);
}

Expansion ustat_step(const Expansion& current, const DiscreteSystem& sys, int t,
                     const PointSet& noise_draws) {
  require(bool(sys.map), "ustat_step: system has no map");
  require(noise_draws.rows() >= 1, "ustat_step: needs at least one noise draw");
  require(noise_draws.allFinite(), "ustat_step: non-finite noise draws");

  const Eigen::Index n_r = current.points.rows();
  const Eigen::Index n_xi = noise_draws.rows();
  const Eigen::Index d = current.points.cols();

  PointSet points(n_r * n_xi, d);
  VectorXd weights(n_r * n_xi);
  for (Eigen::Index i = 0; i < n_r; ++i) {
    const VectorXd xi = current.points.row(i).transpose();
    for (Eigen::Index j = 0; j < n_xi; ++j) {
      VectorXd next = sys.map(t, xi, noise_draws.row(j).transpose());
      require(next.size() == d, "ustat_step: map returned wrong dimension");
      if (!next.allFinite() || next.norm() > 1e12)
        throw BlowupError("ustat_step: state blew up at step " + std::to_string(t + 1),
                          double(t + 1));
      const Eigen::Index idx = i * n_xi + j;
      points.row(idx) = next.transpose();
      weights[idx] = current.weights[i] / double(n_xi);
    }
  }
  return make_expansion(current.kernel, std::move(points), std::move(weights));
}

Expansion ustat_step(const Expansion& current, const DiscreteSystem& sys, int t, int n_xi,
                     RngSeed seed) {
  require(n_xi >= 1, "ustat_step: noise draw count must be >= 1");
  const PointSet draws =
      sample(sys.noise, n_xi, substream(seed, kTagStep, std::uint64_t(t)), double(t));
  return ustat_step(current, sys, t, draws);
}

Expansion reduce(const Expansion& full, int target_size, std::optional<double> ridge,
                 RngSeed seed, ReducedSetConfig::Selection selection) {
  const int f = int(full.points.rows());
  require(target_size >= 1 && target_size <= f,
          "reduce: target size must be in [1, " + std::to_string(f) + "], got " +
              std::to_string(target_size));
  if (ridge)
    require(std::isfinite(*ridge) && *ridge >= 0.0, "reduce: ridge must be nonnegative");

  std::vector<int> chosen = pick_indices(full, target_size, seed, selection);
  PointSet Z(target_size, full.points.cols());
  for (int k = 0; k < target_size; ++k) Z.row(k) = full.points.row(chosen[std::size_t(k)]);

  const MatrixXd k_zz = gram(full.kernel, Z);
  const MatrixXd k_zf = gram(full.kernel, Z, full.points);
  const VectorXd rhs = k_zf * full.weights;

  const double lambda = ridge ? *ridge : 1e-8 * k_zz.trace() / double(target_size);
  std::vector<double> attempts{lambda};
  if (lambda == 0.0) attempts.push_back(1e-10);

  for (double lam : attempts) {
    MatrixXd A = k_zz;
    A.diagonal().array() += lam;
    Eigen::LDLT<MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success) continue;
    VectorXd alpha = ldlt.solve(rhs);
    if (!alpha.allFinite()) continue;
    alpha += ldlt.solve(rhs - A * alpha);  // one refinement pass

    const double scale = rhs.cwiseAbs().maxCoeff() +
                         A.cwiseAbs().rowwise().sum().maxCoeff() * alpha.cwiseAbs().maxCoeff();
    if (!alpha.allFinite() || (A * alpha - rhs).cwiseAbs().maxCoeff() > 1e-7 * (1.0 + scale))
      continue;
    return make_expansion(full.kernel, std::move(Z), std::move(alpha));
  }
  throw Error("reduce: weight system is singular even with ridge fallback");
}

std::vector<Expansion> propagate_reduced(const DiscreteSystem& sys, const VectorXd& x0,
                                         const ReducedSetConfig& cfg, int horizon,
                                         const KernelSpec& kernel, RngSeed seed) {
  require(horizon >= 1, "propagate_reduced: horizon must be >= 1");
  require(cfg.target_size >= 1, "propagate_reduced: target size must be >= 1");
  require(cfg.noise_draws_per_step >= 1, "propagate_reduced: noise draws must be >= 1");
  require(x0.allFinite() && x0.size() >= 1, "propagate_reduced: invalid initial state");

  std::vector<Expansion> out;
  out.reserve(std::size_t(horizon) + 1);
  out.push_back(make_expansion(kernel, x0.transpose(), VectorXd::Ones(1)));

  for (int t = 0; t < horizon; ++t) {
    try {
      const PointSet draws = sample(sys.noise, cfg.noise_draws_per_step,
                                    substream(seed, kTagStep, std::uint64_t(t)), double(t));
      Expansion full = ustat_step(out.back(), sys, t, draws);
      const int target = std::min<int>(cfg.target_size, int(full.points.rows()));
      out.push_back(reduce(full, target, cfg.ridge,
                           substream(seed, kTagReduce, std::uint64_t(t)), cfg.selection));
    } catch (const BlowupError& e) {
      throw BlowupError("propagate_reduced: step " + std::to_string(t) + ": " + e.what(),
                        e.time(), e.realization());
    } catch (const Error& e) {
      throw Error("propagate_reduced: step " + std::to_string(t) + ": " + e.what());
    }
  }
  return out;
}

double approximation_error(const Expansion& candidate, const Expansion& reference) {
  return rkhs_dist_sq(candidate, reference);
}

}  // namespace kmedyn
