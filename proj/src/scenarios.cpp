#include "kmedyn/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "kmedyn/csv.hpp"

namespace kmedyn {

namespace fs = std::filesystem;

namespace {

void check_scenario_tag(const Json& j, const std::string& expected) {
  if (j.contains("scenario"))
    require(j["scenario"] == expected, "config: scenario is \"" + j["scenario"].dump() +
                                           "\" but this runner expects \"" + expected + "\"");
}

template <class T>
T get_or(const Json& j, const std::string& key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  return j[key].get<T>();
}

IntegrationMethod method_from_string(const std::string& s) {
  if (s == "euler") return IntegrationMethod::Euler;
  if (s == "rk4") return IntegrationMethod::RK4;
  throw Error("config: unknown integration method \"" + s + "\" (euler|rk4)");
}

std::string method_to_string(IntegrationMethod m) {
  return m == IntegrationMethod::Euler ? "euler" : "rk4";
}

ReducedSetConfig::Selection selection_from_string(const std::string& s) {
  if (s == "uniform") return ReducedSetConfig::Selection::SubsampleUniform;
  if (s == "weight_proportional") return ReducedSetConfig::Selection::WeightProportional;
  throw Error("config: unknown selection \"" + s + "\" (uniform|weight_proportional)");
}

std::string selection_to_string(ReducedSetConfig::Selection s) {
  return s == ReducedSetConfig::Selection::SubsampleUniform ? "uniform" : "weight_proportional";
}

void write_manifest(const fs::path& out_dir, Json manifest) {
  std::ofstream out(out_dir / "manifest.json");
  require(out.good(), "cannot write manifest in " + out_dir.string());
  out << manifest.dump(2) << '\n';
}

fs::path prepare_out_dir(const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  require(!ec, "cannot create output directory " + out_dir.string());
  return out_dir;
}

// Keeps every stride-th time index, always including the first and last.
TrajectoryEnsemble slice_ensemble(const TrajectoryEnsemble& ens, int stride) {
  require(stride >= 1, "stride must be >= 1");
  TrajectoryEnsemble out;
  out.weights = ens.weights;
  const std::size_t last = ens.times.size() - 1;
  for (std::size_t t = 0; t <= last; t += std::size_t(stride)) {
    out.times.push_back(ens.times[t]);
    out.states.push_back(ens.states[t]);
  }
  if ((last % std::size_t(stride)) != 0) {
    out.times.push_back(ens.times[last]);
    out.states.push_back(ens.states[last]);
  }
  return out;
}

UncertaintySpec mixture_to_law(const std::vector<ScalarMixtureComponent>& mixture) {
  std::vector<std::tuple<double, VectorXd, MatrixXd>> comps;
  for (const auto& c : mixture)
    comps.emplace_back(c.weight, VectorXd::Constant(1, c.mean),
                       MatrixXd::Constant(1, 1, c.stddev * c.stddev));
  return UncertaintySpec::gmm(std::move(comps));
}

void write_histogram_csv(const fs::path& path,
                         const std::vector<std::pair<std::string, VectorXd>>& series,
                         int bins) {
  double lo = series.front().second.minCoeff();
  double hi = series.front().second.maxCoeff();
  for (const auto& [name, values] : series) {
    lo = std::min(lo, values.minCoeff());
    hi = std::max(hi, values.maxCoeff());
  }
  if (hi <= lo) hi = lo + 1.0;  // degenerate data: single bin span
  const double width = (hi - lo) / bins;

  csv::Writer w(path, {"distribution", "bin_lo", "bin_hi", "count"});
  for (const auto& [name, values] : series) {
    std::vector<long> counts(std::size_t(bins), 0);
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      int b = int((values[i] - lo) / width);
      b = std::clamp(b, 0, bins - 1);
      ++counts[std::size_t(b)];
    }
    for (int b = 0; b < bins; ++b)
      w.row({name, csv::fmt(lo + b * width), csv::fmt(lo + (b + 1) * width),
             std::to_string(counts[std::size_t(b)])});
  }
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double stddev_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / double(v.size() - 1));
}

}  // namespace

void write_ensemble_csv(const fs::path& path, const TrajectoryEnsemble& ens, int stride) {
  validate(ens);
  const TrajectoryEnsemble sub = slice_ensemble(ens, stride);
  const Eigen::Index d = sub.states.front().cols();

  std::vector<std::string> header{"time", "realization"};
  for (Eigen::Index k = 0; k < d; ++k) header.push_back("state" + std::to_string(k));
  csv::Writer w(path, header);

  std::vector<std::string> cells(header.size());
  for (std::size_t t = 0; t < sub.times.size(); ++t)
    for (Eigen::Index i = 0; i < sub.states[t].rows(); ++i) {
      cells[0] = csv::fmt(sub.times[t]);
      cells[1] = std::to_string(i);
      for (Eigen::Index k = 0; k < d; ++k) cells[std::size_t(k) + 2] = csv::fmt(sub.states[t](i, k));
      w.row(cells);
    }
}

void write_expansions_csv(const fs::path& path, const std::vector<Expansion>& expansions) {
  require(!expansions.empty(), "write_expansions_csv: no expansions");
  const Eigen::Index d = expansions.front().points.cols();

  std::vector<std::string> header{"step", "point"};
  for (Eigen::Index k = 0; k < d; ++k) header.push_back("state" + std::to_string(k));
  header.push_back("weight");
  csv::Writer w(path, header);

  std::vector<std::string> cells(header.size());
  for (std::size_t t = 0; t < expansions.size(); ++t)
    for (Eigen::Index i = 0; i < expansions[t].points.rows(); ++i) {
      cells[0] = std::to_string(t);
      cells[1] = std::to_string(i);
      for (Eigen::Index k = 0; k < d; ++k)
        cells[std::size_t(k) + 2] = csv::fmt(expansions[t].points(i, k));
      cells.back() = csv::fmt(expansions[t].weights[i]);
      w.row(cells);
    }
}

void write_distance_curve_csv(const fs::path& path, const std::vector<TimeDistance>& curve) {
  csv::Writer w(path, {"time", "distance"});
  for (const auto& td : curve) w.row({csv::fmt(td.time), csv::fmt(td.value)});
}

// ---- ode_gmm ------------------------------------------------------------

Json ode_gmm_config_to_json(const OdeGmmConfig& cfg) {
  Json mixture = Json::array();
  for (const auto& c : cfg.mixture)
    mixture.push_back(Json{{"weight", c.weight}, {"mean", c.mean}, {"std", c.stddev}});
  return Json{{"scenario", "ode_gmm"},
              {"mixture", mixture},
              {"x0", cfg.x0},
              {"t0", cfg.t0},
              {"t_end", cfg.t_end},
              {"step", cfg.step},
              {"method", method_to_string(cfg.method)},
              {"n", cfg.n},
              {"gaussian_bandwidths", cfg.gaussian_bandwidths},
              {"polynomial_degrees", cfg.polynomial_degrees},
              {"distance_stride", cfg.distance_stride},
              {"ensemble_stride", cfg.ensemble_stride},
              {"hist_bins", cfg.hist_bins},
              {"seed", cfg.seed}};
}

OdeGmmConfig ode_gmm_config_from_json(const Json& j) {
  check_scenario_tag(j, "ode_gmm");
  OdeGmmConfig cfg;
  if (j.contains("mixture")) {
    cfg.mixture.clear();
    for (const auto& c : j["mixture"])
      cfg.mixture.push_back({c.at("weight").get<double>(), c.at("mean").get<double>(),
                             c.at("std").get<double>()});
  }
  cfg.x0 = get_or(j, "x0", cfg.x0);
  cfg.t0 = get_or(j, "t0", cfg.t0);
  cfg.t_end = get_or(j, "t_end", cfg.t_end);
  cfg.step = get_or(j, "step", cfg.step);
  cfg.method = method_from_string(get_or<std::string>(j, "method", method_to_string(cfg.method)));
  cfg.n = get_or(j, "n", cfg.n);
  cfg.gaussian_bandwidths = get_or(j, "gaussian_bandwidths", cfg.gaussian_bandwidths);
  cfg.polynomial_degrees = get_or(j, "polynomial_degrees", cfg.polynomial_degrees);
  cfg.distance_stride = get_or(j, "distance_stride", cfg.distance_stride);
  cfg.ensemble_stride = get_or(j, "ensemble_stride", cfg.ensemble_stride);
  cfg.hist_bins = get_or(j, "hist_bins", cfg.hist_bins);
  cfg.seed = get_or(j, "seed", cfg.seed);
  return cfg;
}

OdeGmmResult run_ode_gmm(const OdeGmmConfig& cfg, const fs::path& out_dir) {
  require(cfg.n >= 1, "ode_gmm: n must be >= 1");
  require(cfg.hist_bins >= 1, "ode_gmm: hist_bins must be >= 1");
  prepare_out_dir(out_dir);

  const UncertaintySpec mixture = mixture_to_law(cfg.mixture);
  const UncertaintySpec matched = moment_match_gaussian(mixture);
  const ContinuousSystem sys = make_linear_ode(cfg.t0, cfg.t_end, cfg.step, cfg.method);
  const VectorXd x0 = VectorXd::Constant(1, cfg.x0);
  const RngSeed root{cfg.seed};

  const PointSet params_mix = sample(mixture, cfg.n, substream(root, 1));
  const PointSet params_matched = sample(matched, cfg.n, substream(root, 2));
  const TrajectoryEnsemble ens_mix = propagate_direct(sys, x0, params_mix);
  const TrajectoryEnsemble ens_matched = propagate_direct(sys, x0, params_matched);

  write_histogram_csv(out_dir / "param_hist.csv",
                      {{"gmm", params_mix.col(0)}, {"gaussian", params_matched.col(0)}},
                      cfg.hist_bins);
  write_ensemble_csv(out_dir / "ensemble_gmm.csv", ens_mix, cfg.ensemble_stride);
  write_ensemble_csv(out_dir / "ensemble_gaussian.csv", ens_matched, cfg.ensemble_stride);

  const TrajectoryEnsemble sub_mix = slice_ensemble(ens_mix, cfg.distance_stride);
  const TrajectoryEnsemble sub_matched = slice_ensemble(ens_matched, cfg.distance_stride);

  std::vector<KernelSpec> kernels;
  for (int p : cfg.polynomial_degrees) kernels.push_back(KernelSpec::polynomial(p));
  for (double bw : cfg.gaussian_bandwidths) kernels.push_back(KernelSpec::gaussian(bw));

  OdeGmmResult result;
  result.times = sub_mix.times;
  csv::Writer w(out_dir / "distances.csv", {"time", "kernel", "value"});
  for (const auto& spec : kernels) {
    const auto curve = mmd_over_time(sub_mix, sub_matched, spec);
    std::vector<double> values;
    values.reserve(curve.size());
    for (const auto& td : curve) {
      w.row({csv::fmt(td.time), spec.label(), csv::fmt(td.value)});
      values.push_back(td.value);
    }
    result.curves.emplace_back(spec.label(), std::move(values));
  }

  write_manifest(out_dir, ode_gmm_config_to_json(cfg));
  return result;
}

// ---- arx_fit ------------------------------------------------------------

Json arx_fit_config_to_json(const ArxFitConfig& cfg) {
  return Json{{"scenario", "arx_fit"},
              {"a1", cfg.a1},
              {"true", Json{{"center", vector_to_json(cfg.true_center)},
                            {"shape", matrix_to_json(cfg.true_shape)}}},
              {"pve", Json{{"center", vector_to_json(cfg.pve_center)},
                           {"shape", matrix_to_json(cfg.pve_shape)}}},
              {"lsq", Json{{"mean", vector_to_json(cfg.lsq_mean)},
                           {"cov", matrix_to_json(cfg.lsq_cov)}}},
              {"horizon", cfg.horizon},
              {"n", cfg.n},
              {"input_amplitude", cfg.input_amplitude},
              {"input_omega", cfg.input_omega},
              {"x_init", vector_to_json(cfg.x_init)},
              {"redraw_each_step", cfg.redraw_each_step},
              {"kernel", kernel_to_json(cfg.kernel)},
              {"distance_stride", cfg.distance_stride},
              {"ensemble_stride", cfg.ensemble_stride},
              {"seed", cfg.seed}};
}

ArxFitConfig arx_fit_config_from_json(const Json& j) {
  check_scenario_tag(j, "arx_fit");
  ArxFitConfig cfg;
  cfg.a1 = get_or(j, "a1", cfg.a1);
  if (j.contains("true")) {
    cfg.true_center = vector_from_json(j["true"].at("center"), "true center");
    cfg.true_shape = matrix_from_json(j["true"].at("shape"), "true shape");
  }
  if (j.contains("pve")) {
    cfg.pve_center = vector_from_json(j["pve"].at("center"), "pve center");
    cfg.pve_shape = matrix_from_json(j["pve"].at("shape"), "pve shape");
  }
  if (j.contains("lsq")) {
    cfg.lsq_mean = vector_from_json(j["lsq"].at("mean"), "lsq mean");
    cfg.lsq_cov = matrix_from_json(j["lsq"].at("cov"), "lsq cov");
  }
  cfg.horizon = get_or(j, "horizon", cfg.horizon);
  cfg.n = get_or(j, "n", cfg.n);
  cfg.input_amplitude = get_or(j, "input_amplitude", cfg.input_amplitude);
  cfg.input_omega = get_or(j, "input_omega", cfg.input_omega);
  if (j.contains("x_init")) cfg.x_init = vector_from_json(j["x_init"], "x_init");
  cfg.redraw_each_step = get_or(j, "redraw_each_step", cfg.redraw_each_step);
  if (j.contains("kernel")) cfg.kernel = kernel_from_json(j["kernel"]);
  cfg.distance_stride = get_or(j, "distance_stride", cfg.distance_stride);
  cfg.ensemble_stride = get_or(j, "ensemble_stride", cfg.ensemble_stride);
  cfg.seed = get_or(j, "seed", cfg.seed);
  return cfg;
}

ArxFitResult run_arx_fit(const ArxFitConfig& cfg, const fs::path& out_dir) {
  require(cfg.n >= 1 && cfg.horizon >= 1, "arx_fit: n and horizon must be >= 1");
  prepare_out_dir(out_dir);

  const UncertaintySpec true_law = UncertaintySpec::ellipsoid(cfg.true_center, cfg.true_shape);
  const UncertaintySpec pve_law = UncertaintySpec::ellipsoid(cfg.pve_center, cfg.pve_shape);
  const UncertaintySpec lsq_law = UncertaintySpec::gaussian(cfg.lsq_mean, cfg.lsq_cov);
  validate_arx_stability(cfg.a1, true_law);
  validate_arx_stability(cfg.a1, pve_law);
  validate_arx_stability(cfg.a1, lsq_law);

  const double amp = cfg.input_amplitude, omega = cfg.input_omega;
  auto input = [amp, omega](int k) { return amp * std::sin(omega * double(k)); };

  const RngSeed root{cfg.seed};
  auto simulate = [&](const UncertaintySpec& law, std::uint64_t tag) {
    const DiscreteSystem sys = make_arx(cfg.a1, input, cfg.horizon, law, cfg.redraw_each_step);
    return propagate_direct(sys, cfg.x_init, cfg.n, substream(root, tag));
  };
  const TrajectoryEnsemble ens_true = simulate(true_law, 1);
  const TrajectoryEnsemble ens_pve = simulate(pve_law, 2);
  const TrajectoryEnsemble ens_lsq = simulate(lsq_law, 3);

  write_ensemble_csv(out_dir / "ensemble_true.csv", ens_true, cfg.ensemble_stride);
  write_ensemble_csv(out_dir / "ensemble_pve.csv", ens_pve, cfg.ensemble_stride);
  write_ensemble_csv(out_dir / "ensemble_lsq.csv", ens_lsq, cfg.ensemble_stride);

  const TrajectoryEnsemble sub_true = slice_ensemble(ens_true, cfg.distance_stride);
  const auto pve_curve = mmd_over_time(slice_ensemble(ens_pve, cfg.distance_stride), sub_true,
                                       cfg.kernel);
  const auto lsq_curve = mmd_over_time(slice_ensemble(ens_lsq, cfg.distance_stride), sub_true,
                                       cfg.kernel);

  ArxFitResult result;
  csv::Writer w(out_dir / "distances.csv", {"time", "kernel", "value"});
  for (std::size_t i = 0; i < pve_curve.size(); ++i) {
    result.times.push_back(pve_curve[i].time);
    result.pve_distance.push_back(pve_curve[i].value);
    result.lsq_distance.push_back(lsq_curve[i].value);
    w.row({csv::fmt(pve_curve[i].time), "pve", csv::fmt(pve_curve[i].value)});
    w.row({csv::fmt(lsq_curve[i].time), "lsq", csv::fmt(lsq_curve[i].value)});
  }

  write_manifest(out_dir, arx_fit_config_to_json(cfg));
  return result;
}

// ---- reduced_prop -------------------------------------------------------

Json reduced_prop_config_to_json(const ReducedPropConfig& cfg) {
  Json j{{"scenario", "reduced_prop"},
         {"horizon", cfg.horizon},
         {"x0", cfg.x0},
         {"noise_lower", cfg.noise_lower},
         {"noise_upper", cfg.noise_upper},
         {"noise_drift", cfg.noise_drift},
         {"bandwidth", cfg.bandwidth},
         {"sizes", cfg.sizes},
         {"reference_n", cfg.reference_n},
         {"repetitions", cfg.repetitions},
         {"selection", selection_to_string(cfg.selection)},
         {"display_paths", cfg.display_paths},
         {"seed", cfg.seed}};
  j["n_xi"] = cfg.n_xi ? Json(*cfg.n_xi) : Json(nullptr);
  j["ridge"] = cfg.ridge ? Json(*cfg.ridge) : Json(nullptr);
  return j;
}

ReducedPropConfig reduced_prop_config_from_json(const Json& j) {
  check_scenario_tag(j, "reduced_prop");
  ReducedPropConfig cfg;
  cfg.horizon = get_or(j, "horizon", cfg.horizon);
  cfg.x0 = get_or(j, "x0", cfg.x0);
  cfg.noise_lower = get_or(j, "noise_lower", cfg.noise_lower);
  cfg.noise_upper = get_or(j, "noise_upper", cfg.noise_upper);
  cfg.noise_drift = get_or(j, "noise_drift", cfg.noise_drift);
  cfg.bandwidth = get_or(j, "bandwidth", cfg.bandwidth);
  cfg.sizes = get_or(j, "sizes", cfg.sizes);
  if (j.contains("n_xi") && !j["n_xi"].is_null()) cfg.n_xi = j["n_xi"].get<int>();
  cfg.reference_n = get_or(j, "reference_n", cfg.reference_n);
  cfg.repetitions = get_or(j, "repetitions", cfg.repetitions);
  if (j.contains("ridge") && !j["ridge"].is_null()) cfg.ridge = j["ridge"].get<double>();
  cfg.selection = selection_from_string(
      get_or<std::string>(j, "selection", selection_to_string(cfg.selection)));
  cfg.display_paths = get_or(j, "display_paths", cfg.display_paths);
  cfg.seed = get_or(j, "seed", cfg.seed);
  return cfg;
}

ReducedPropResult run_reduced_prop(const ReducedPropConfig& cfg, const fs::path& out_dir) {
  require(cfg.horizon >= 1 && cfg.reference_n >= 1 && cfg.repetitions >= 1,
          "reduced_prop: horizon, reference_n and repetitions must be >= 1");
  require(!cfg.sizes.empty(), "reduced_prop: sizes must be nonempty");
  prepare_out_dir(out_dir);

  const UncertaintySpec noise =
      UncertaintySpec::uniform_box(VectorXd::Constant(1, cfg.noise_lower),
                                   VectorXd::Constant(1, cfg.noise_upper))
          .with_linear_drift(VectorXd::Constant(1, cfg.noise_drift));
  const DiscreteSystem sys = make_random_walk(cfg.horizon, noise);
  const KernelSpec kernel = KernelSpec::gaussian(cfg.bandwidth);
  const VectorXd x0 = VectorXd::Constant(1, cfg.x0);
  const RngSeed root{cfg.seed};

  ReducedPropResult result;
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    // One stream per repetition, shared by the reference and both methods:
    // per-step batches are drawn point-by-point, so the smaller runs consume
    // a prefix of the reference's draws (common random numbers).
    const RngSeed rep_seed = substream(root, 0x5C, std::uint64_t(rep));
    const TrajectoryEnsemble ref_ens = propagate_direct(sys, x0, cfg.reference_n, rep_seed);
    const Expansion reference = embed_uniform(ref_ens.states.back(), kernel);

    for (int size : cfg.sizes) {
      require(size >= 1, "reduced_prop: sizes must be >= 1");
      const TrajectoryEnsemble dir_ens = propagate_direct(sys, x0, size, rep_seed);
      const double err_direct =
          approximation_error(embed_uniform(dir_ens.states.back(), kernel), reference);

      ReducedSetConfig rs;
      rs.target_size = size;
      rs.noise_draws_per_step = cfg.n_xi.value_or(size);
      rs.ridge = cfg.ridge;
      rs.selection = cfg.selection;
      const auto expansions = propagate_reduced(sys, x0, rs, cfg.horizon, kernel, rep_seed);
      const double err_reduced = approximation_error(expansions.back(), reference);

      result.rows.push_back({"direct", size, rep, err_direct});
      result.rows.push_back({"reduced", size, rep, err_reduced});
    }
  }

  for (const std::string& method : {"direct", "reduced"})
    for (int size : cfg.sizes) {
      std::vector<double> errs;
      for (const auto& row : result.rows)
        if (row.method == method && row.size == size) errs.push_back(row.error);
      const double m = mean_of(errs);
      result.summary.push_back({method, size, m, stddev_of(errs, m)});
    }

  {
    csv::Writer w(out_dir / "errors.csv", {"method", "size", "seed", "error"});
    for (const auto& row : result.rows)
      w.row({row.method, std::to_string(row.size), std::to_string(row.rep),
             csv::fmt(row.error)});
  }
  {
    csv::Writer w(out_dir / "summary.csv", {"method", "size", "mean", "std"});
    for (const auto& s : result.summary)
      w.row({s.method, std::to_string(s.size), csv::fmt(s.mean), csv::fmt(s.stddev)});
  }

  // Display outputs: a small Monte Carlo fan plus the reduced sets kept at
  // each step for the first size.
  if (cfg.display_paths >= 1) {
    const RngSeed disp_seed = substream(root, 0xD1);
    write_ensemble_csv(out_dir / "trajectories.csv",
                       propagate_direct(sys, x0, cfg.display_paths, disp_seed), 1);
    ReducedSetConfig rs;
    rs.target_size = cfg.sizes.front();
    rs.noise_draws_per_step = cfg.n_xi.value_or(rs.target_size);
    rs.ridge = cfg.ridge;
    rs.selection = cfg.selection;
    write_expansions_csv(out_dir / "expansions.csv",
                         propagate_reduced(sys, x0, rs, cfg.horizon, kernel, disp_seed));
  }

  write_manifest(out_dir, reduced_prop_config_to_json(cfg));
  return result;
}

// ---- propagate ----------------------------------------------------------

Json propagate_config_to_json(const PropagateConfig& cfg) {
  Json j{{"scenario", "propagate"},
         {"system", cfg.system},
         {"mode", cfg.mode},
         {"n", cfg.n},
         {"t0", cfg.t0},
         {"t_end", cfg.t_end},
         {"step", cfg.step},
         {"method", method_to_string(cfg.method)},
         {"horizon", cfg.horizon},
         {"a1", cfg.a1},
         {"input_amplitude", cfg.input_amplitude},
         {"input_omega", cfg.input_omega},
         {"redraw_each_step", cfg.redraw_each_step},
         {"nr", cfg.nr},
         {"nxi", cfg.nxi},
         {"selection", selection_to_string(cfg.selection)},
         {"kernel", kernel_to_json(cfg.kernel)},
         {"ensemble_stride", cfg.ensemble_stride},
         {"seed", cfg.seed}};
  j["x0"] = cfg.x0.size() ? vector_to_json(cfg.x0) : Json(nullptr);  // null: per-system default
  j["uncertainty"] = cfg.uncertainty ? *cfg.uncertainty : Json(nullptr);
  j["ridge"] = cfg.ridge ? Json(*cfg.ridge) : Json(nullptr);
  return j;
}

PropagateConfig propagate_config_from_json(const Json& j) {
  check_scenario_tag(j, "propagate");
  PropagateConfig cfg;
  cfg.system = get_or(j, "system", cfg.system);
  cfg.mode = get_or(j, "mode", cfg.mode);
  if (j.contains("uncertainty") && !j["uncertainty"].is_null()) cfg.uncertainty = j["uncertainty"];
  if (j.contains("x0") && !j["x0"].is_null()) cfg.x0 = vector_from_json(j["x0"], "x0");
  cfg.n = get_or(j, "n", cfg.n);
  cfg.t0 = get_or(j, "t0", cfg.t0);
  cfg.t_end = get_or(j, "t_end", cfg.t_end);
  cfg.step = get_or(j, "step", cfg.step);
  cfg.method = method_from_string(get_or<std::string>(j, "method", method_to_string(cfg.method)));
  cfg.horizon = get_or(j, "horizon", cfg.horizon);
  cfg.a1 = get_or(j, "a1", cfg.a1);
  cfg.input_amplitude = get_or(j, "input_amplitude", cfg.input_amplitude);
  cfg.input_omega = get_or(j, "input_omega", cfg.input_omega);
  cfg.redraw_each_step = get_or(j, "redraw_each_step", cfg.redraw_each_step);
  cfg.nr = get_or(j, "nr", cfg.nr);
  cfg.nxi = get_or(j, "nxi", cfg.nxi);
  if (j.contains("ridge") && !j["ridge"].is_null()) cfg.ridge = j["ridge"].get<double>();
  cfg.selection = selection_from_string(
      get_or<std::string>(j, "selection", selection_to_string(cfg.selection)));
  if (j.contains("kernel")) cfg.kernel = kernel_from_json(j["kernel"]);
  cfg.ensemble_stride = get_or(j, "ensemble_stride", cfg.ensemble_stride);
  cfg.seed = get_or(j, "seed", cfg.seed);
  return cfg;
}

void run_propagate(const PropagateConfig& cfg, const fs::path& out_dir) {
  prepare_out_dir(out_dir);
  const RngSeed root{cfg.seed};

  if (cfg.system == "linear_ode") {
    require(cfg.mode == "direct", "propagate: linear_ode supports direct mode only");
    const UncertaintySpec law = cfg.uncertainty
                                    ? uncertainty_from_json(*cfg.uncertainty)
                                    : mixture_to_law({{0.7, -0.6, 0.25}, {0.3, 1.0, 0.35}});
    const VectorXd x0 = cfg.x0.size() ? cfg.x0 : VectorXd::Constant(1, 1.0);
    const ContinuousSystem sys = make_linear_ode(cfg.t0, cfg.t_end, cfg.step, cfg.method);
    write_ensemble_csv(out_dir / "ensemble.csv",
                       propagate_direct(sys, x0, law, cfg.n, root), cfg.ensemble_stride);
    write_manifest(out_dir, propagate_config_to_json(cfg));
    return;
  }

  DiscreteSystem sys;
  VectorXd x0;
  if (cfg.system == "random_walk_drift") {
    const UncertaintySpec noise =
        cfg.uncertainty ? uncertainty_from_json(*cfg.uncertainty)
                        : UncertaintySpec::uniform_box(VectorXd::Constant(1, -0.5),
                                                       VectorXd::Constant(1, 0.5))
                              .with_linear_drift(VectorXd::Constant(1, 0.1));
    sys = make_random_walk(cfg.horizon, noise);
    x0 = cfg.x0.size() ? cfg.x0 : VectorXd::Zero(noise.dim());
  } else if (cfg.system == "arx2") {
    ArxFitConfig defaults;
    const UncertaintySpec law =
        cfg.uncertainty ? uncertainty_from_json(*cfg.uncertainty)
                        : UncertaintySpec::ellipsoid(defaults.true_center, defaults.true_shape);
    validate_arx_stability(cfg.a1, law);
    const double amp = cfg.input_amplitude, omega = cfg.input_omega;
    sys = make_arx(
        cfg.a1, [amp, omega](int k) { return amp * std::sin(omega * double(k)); }, cfg.horizon,
        law, cfg.redraw_each_step);
    x0 = cfg.x0.size() ? cfg.x0 : VectorXd::Zero(2);
  } else {
    throw Error("propagate: unknown system \"" + cfg.system +
                "\" (linear_ode|arx2|random_walk_drift)");
  }

  if (cfg.mode == "direct") {
    write_ensemble_csv(out_dir / "ensemble.csv", propagate_direct(sys, x0, cfg.n, root),
                       cfg.ensemble_stride);
  } else if (cfg.mode == "reduced") {
    ReducedSetConfig rs;
    rs.target_size = cfg.nr;
    rs.noise_draws_per_step = cfg.nxi;
    rs.ridge = cfg.ridge;
    rs.selection = cfg.selection;
    write_expansions_csv(out_dir / "expansions.csv",
                         propagate_reduced(sys, x0, rs, cfg.horizon, cfg.kernel, root));
  } else {
    throw Error("propagate: unknown mode \"" + cfg.mode + "\" (direct|reduced)");
  }
  write_manifest(out_dir, propagate_config_to_json(cfg));
}

// ---- mmd ----------------------------------------------------------------

double median_pairwise_distance(const PointSet& points) {
  require(points.rows() >= 2, "median bandwidth: needs at least two pooled points");
  const Eigen::Index cap = 2000;
  PointSet sub;
  if (points.rows() > cap) {
    sub.resize(cap, points.cols());
    const Eigen::Index stride = points.rows() / cap;
    for (Eigen::Index i = 0; i < cap; ++i) sub.row(i) = points.row(i * stride);
  } else {
    sub = points;
  }

  std::vector<double> dists;
  dists.reserve(std::size_t(sub.rows()) * std::size_t(sub.rows() - 1) / 2);
  for (Eigen::Index i = 0; i < sub.rows(); ++i)
    for (Eigen::Index j = i + 1; j < sub.rows(); ++j)
      dists.push_back((sub.row(i) - sub.row(j)).norm());

  auto mid = dists.begin() + std::ptrdiff_t(dists.size() / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  return *mid;
}

MmdFilesResult mmd_between_files(const fs::path& file_a, const fs::path& file_b,
                                 const std::string& kernel_kind, const std::string& bandwidth,
                                 int degree, const fs::path& out_dir) {
  const MatrixXd a = csv::read_matrix(file_a);
  const MatrixXd b = csv::read_matrix(file_b);
  require(a.cols() == b.cols(), "mmd: files have different column counts (" +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) +
                                    ")");

  KernelSpec spec = [&] {
    if (kernel_kind == "linear") return KernelSpec::linear();
    if (kernel_kind == "polynomial") return KernelSpec::polynomial(degree);
    if (kernel_kind == "exponential") return KernelSpec::exponential();
    if (kernel_kind == "gaussian") {
      if (bandwidth == "median") {
        PointSet pooled(a.rows() + b.rows(), a.cols());
        pooled << a, b;
        return KernelSpec::gaussian(median_pairwise_distance(pooled));
      }
      char* end = nullptr;
      const double bw = std::strtod(bandwidth.c_str(), &end);
      require(end != bandwidth.c_str() && *end == '\0',
              "mmd: bandwidth must be a number or \"median\", got \"" + bandwidth + "\"");
      return KernelSpec::gaussian(bw);
    }
    throw Error("mmd: unknown kernel \"" + kernel_kind +
                "\" (linear|polynomial|gaussian|exponential)");
  }();

  const double dist =
      std::sqrt(rkhs_dist_sq(embed_uniform(a, spec), embed_uniform(b, spec)));

  prepare_out_dir(out_dir);
  csv::Writer w(out_dir / "mmd.csv", {"kernel", "value"});
  w.row({spec.label(), csv::fmt(dist)});
  return {dist, spec};
}

}  // namespace kmedyn
