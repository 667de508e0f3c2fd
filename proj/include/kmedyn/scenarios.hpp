#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kmedyn/config.hpp"
#include "kmedyn/propagation.hpp"

namespace kmedyn {

// Scenario runners write their CSV outputs plus a manifest.json echoing the
// fully resolved configuration; re-running a manifest reproduces every output
// byte for byte. Summary values are also returned for programmatic use.

// ---- Uncertain scalar ODE: mixture vs moment-matched Gaussian ---------

struct ScalarMixtureComponent {
  double weight;
  double mean;
  double stddev;
};

struct OdeGmmConfig {
  // Bimodal, skewed by default; the matched Gaussian shares its first two
  // moments but none beyond.
  std::vector<ScalarMixtureComponent> mixture = {{0.7, -0.6, 0.25}, {0.3, 1.0, 0.35}};
  double x0 = 1.0;
  double t0 = 0.0;
  double t_end = 3.0;
  double step = 0.01;
  IntegrationMethod method = IntegrationMethod::Euler;
  int n = 500;
  std::vector<double> gaussian_bandwidths = {0.1, 1.0, 10.0};
  std::vector<int> polynomial_degrees = {1, 2, 3, 4};
  int distance_stride = 10;  // evaluate distances every k-th grid point
  int ensemble_stride = 10;  // write ensemble rows every k-th grid point
  int hist_bins = 50;
  std::uint64_t seed = 42;
};

Json ode_gmm_config_to_json(const OdeGmmConfig& cfg);
OdeGmmConfig ode_gmm_config_from_json(const Json& j);

struct OdeGmmResult {
  std::vector<double> times;
  // kernel label -> distance curve over `times`
  std::vector<std::pair<std::string, std::vector<double>>> curves;
};

OdeGmmResult run_ode_gmm(const OdeGmmConfig& cfg, const std::filesystem::path& out_dir);

// ---- ARX goodness-of-fit: ellipsoidal vs Gaussian parameter models ----

struct ArxFitConfig {
  double a1 = 0.5;
  // True generating law: parameters (a2, b1) uniform in an ellipsoid.
  VectorXd true_center = (VectorXd(2) << 0.2, 0.3).finished();
  MatrixXd true_shape = (MatrixXd(2, 2) << 0.01, 0.003, 0.003, 0.01).finished();
  // Estimated variability ellipsoid (slightly inflated and off-center).
  VectorXd pve_center = (VectorXd(2) << 0.205, 0.295).finished();
  MatrixXd pve_shape = (MatrixXd(2, 2) << 0.012, 0.0036, 0.0036, 0.012).finished();
  // Gaussian parameter model from a point estimate plus sample variance.
  VectorXd lsq_mean = (VectorXd(2) << 0.23, 0.27).finished();
  MatrixXd lsq_cov = (MatrixXd(2, 2) << 0.006, 0.0, 0.0, 0.006).finished();
  int horizon = 600;
  int n = 500;
  double input_amplitude = 1.0;
  double input_omega = 0.1;  // u_k = amplitude * sin(omega * k)
  VectorXd x_init = VectorXd::Zero(2);
  bool redraw_each_step = true;
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  int distance_stride = 1;
  int ensemble_stride = 10;
  std::uint64_t seed = 42;
};

Json arx_fit_config_to_json(const ArxFitConfig& cfg);
ArxFitConfig arx_fit_config_from_json(const Json& j);

struct ArxFitResult {
  std::vector<double> times;
  std::vector<double> pve_distance;
  std::vector<double> lsq_distance;
};

ArxFitResult run_arx_fit(const ArxFitConfig& cfg, const std::filesystem::path& out_dir);

// ---- Random walk with drifting noise: reduced set vs direct -----------

struct ReducedPropConfig {
  int horizon = 10;
  double x0 = 0.0;
  double noise_lower = -0.5;
  double noise_upper = 0.5;
  double noise_drift = 0.1;  // support shifts by drift * t
  double bandwidth = 0.5;
  std::vector<int> sizes = {5, 10, 25, 50};
  std::optional<int> n_xi;  // absent: per-size draws, n_xi = size
  int reference_n = 500;
  int repetitions = 10;
  std::optional<double> ridge;
  ReducedSetConfig::Selection selection = ReducedSetConfig::Selection::SubsampleUniform;
  int display_paths = 50;
  std::uint64_t seed = 42;
};

Json reduced_prop_config_to_json(const ReducedPropConfig& cfg);
ReducedPropConfig reduced_prop_config_from_json(const Json& j);

struct ReducedPropResult {
  struct Row {
    std::string method;  // "reduced" or "direct"
    int size;
    int rep;
    double error;  // squared RKHS distance to the per-rep reference
  };
  struct Summary {
    std::string method;
    int size;
    double mean;
    double stddev;
  };
  std::vector<Row> rows;
  std::vector<Summary> summary;
};

ReducedPropResult run_reduced_prop(const ReducedPropConfig& cfg,
                                   const std::filesystem::path& out_dir);

// ---- Generic propagation front door ------------------------------------

struct PropagateConfig {
  std::string system = "random_walk_drift";  // linear_ode | arx2 | random_walk_drift
  std::string mode = "direct";               // direct | reduced (discrete systems only)
  std::optional<Json> uncertainty;           // law override; defaults per system
  VectorXd x0;                               // empty: per-system default
  int n = 500;
  // continuous systems
  double t0 = 0.0;
  double t_end = 3.0;
  double step = 0.01;
  IntegrationMethod method = IntegrationMethod::RK4;
  // discrete systems
  int horizon = 10;
  double a1 = 0.5;
  double input_amplitude = 1.0;
  double input_omega = 0.1;
  bool redraw_each_step = true;
  // reduced mode
  int nr = 10;
  int nxi = 10;
  std::optional<double> ridge;
  ReducedSetConfig::Selection selection = ReducedSetConfig::Selection::SubsampleUniform;
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  int ensemble_stride = 1;
  std::uint64_t seed = 42;
};

Json propagate_config_to_json(const PropagateConfig& cfg);
PropagateConfig propagate_config_from_json(const Json& j);

void run_propagate(const PropagateConfig& cfg, const std::filesystem::path& out_dir);

// ---- Two-sample MMD between CSV files ----------------------------------

struct MmdFilesResult {
  double distance;
  KernelSpec kernel;
};

/// Reads two numeric CSV matrices with matching column counts and reports the
/// RKHS distance between their uniform embeddings. `bandwidth` applies to the
/// Gaussian kernel; the string "median" selects the median pairwise distance
/// of the pooled sample (a common heuristic, provided for convenience).
MmdFilesResult mmd_between_files(const std::filesystem::path& file_a,
                                 const std::filesystem::path& file_b,
                                 const std::string& kernel_kind, const std::string& bandwidth,
                                 int degree, const std::filesystem::path& out_dir);

/// Median pairwise Euclidean distance; subsamples deterministically above
/// 2000 points to keep the pair count bounded.
double median_pairwise_distance(const PointSet& points);

void write_ensemble_csv(const std::filesystem::path& path, const TrajectoryEnsemble& ens,
                        int stride);
void write_expansions_csv(const std::filesystem::path& path,
                          const std::vector<Expansion>& expansions);
void write_distance_curve_csv(const std::filesystem::path& path,
                              const std::vector<TimeDistance>& curve);

}  // namespace kmedyn
