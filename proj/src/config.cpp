#include "kmedyn/config.hpp"

namespace kmedyn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string kind_of(const Json& j, const std::string& what) {
  require(j.is_object() && j.contains("kind") && j["kind"].is_string(),
          what + ": expected an object with a string \"kind\" field");
  return j["kind"].get<std::string>();
}

double number_field(const Json& j, const std::string& key, const std::string& what) {
  require(j.contains(key) && j[key].is_number(), what + ": missing numeric field \"" + key + "\"");
  return j[key].get<double>();
}

}  // namespace

Json vector_to_json(const VectorXd& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

VectorXd vector_from_json(const Json& j, const std::string& what) {
  require(j.is_array() && !j.empty(), what + ": expected a nonempty array");
  VectorXd v(Eigen::Index(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), what + ": expected numbers");
    v[Eigen::Index(i)] = j[i].get<double>();
  }
  return v;
}

Json matrix_to_json(const MatrixXd& m) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) j.push_back(vector_to_json(m.row(i).transpose()));
  return j;
}

MatrixXd matrix_from_json(const Json& j, const std::string& what) {
  require(j.is_array() && !j.empty(), what + ": expected a nonempty array of rows");
  const VectorXd first = vector_from_json(j[0], what);
  MatrixXd m(Eigen::Index(j.size()), first.size());
  m.row(0) = first.transpose();
  for (std::size_t i = 1; i < j.size(); ++i) {
    const VectorXd row = vector_from_json(j[i], what);
    require(row.size() == first.size(), what + ": ragged rows");
    m.row(Eigen::Index(i)) = row.transpose();
  }
  return m;
}

Json kernel_to_json(const KernelSpec& spec) {
  return std::visit(
      overloaded{[](const LinearKernel&) { return Json{{"kind", "linear"}}; },
                 [](const PolynomialKernel& k) {
                   return Json{{"kind", "polynomial"}, {"degree", k.degree}};
                 },
                 [](const GaussianKernel& k) {
                   return Json{{"kind", "gaussian"}, {"bandwidth", k.bandwidth}};
                 },
                 [](const ExponentialKernel& k) {
                   return Json{{"kind", "exponential"}, {"cap", k.cap}};
                 }},
      spec.variant());
}

KernelSpec kernel_from_json(const Json& j) {
  const std::string kind = kind_of(j, "kernel");
  if (kind == "linear") return KernelSpec::linear();
  if (kind == "polynomial")
    return KernelSpec::polynomial(int(number_field(j, "degree", "polynomial kernel")));
  if (kind == "gaussian")
    return KernelSpec::gaussian(number_field(j, "bandwidth", "gaussian kernel"));
  if (kind == "exponential")
    return KernelSpec::exponential(j.contains("cap") ? number_field(j, "cap", "exponential kernel")
                                                     : 700.0);
  throw Error("kernel: unknown kind \"" + kind + "\"");
}

Json uncertainty_to_json(const UncertaintySpec& spec) {
  require(!spec.time_shift || spec.linear_drift_rate.has_value(),
          "uncertainty: a custom time shift cannot be serialized");
  Json j = std::visit(
      overloaded{[](const GaussianLaw& l) {
                   return Json{{"kind", "gaussian"},
                               {"mean", vector_to_json(l.mean)},
                               {"cov", matrix_to_json(l.cov)}};
                 },
                 [](const GmmLaw& l) {
                   Json comps = Json::array();
                   for (const auto& c : l.components)
                     comps.push_back(Json{{"weight", c.weight},
                                          {"mean", vector_to_json(c.mean)},
                                          {"cov", matrix_to_json(c.cov)}});
                   return Json{{"kind", "gmm"}, {"components", comps}};
                 },
                 [](const UniformBoxLaw& l) {
                   return Json{{"kind", "uniform_box"},
                               {"lower", vector_to_json(l.lower)},
                               {"upper", vector_to_json(l.upper)}};
                 },
                 [](const EllipsoidLaw& l) {
                   return Json{{"kind", "ellipsoid"},
                               {"center", vector_to_json(l.center)},
                               {"shape", matrix_to_json(l.shape)}};
                 }},
      spec.law);
  if (spec.linear_drift_rate) j["drift"] = vector_to_json(*spec.linear_drift_rate);
  return j;
}

UncertaintySpec uncertainty_from_json(const Json& j) {
  const std::string kind = kind_of(j, "uncertainty");
  UncertaintySpec spec = [&] {
    if (kind == "gaussian")
      return UncertaintySpec::gaussian(vector_from_json(j.at("mean"), "gaussian mean"),
                                       matrix_from_json(j.at("cov"), "gaussian cov"));
    if (kind == "gmm") {
      require(j.contains("components") && j["components"].is_array(),
              "gmm: missing components array");
      std::vector<std::tuple<double, VectorXd, MatrixXd>> comps;
      for (const auto& c : j["components"])
        comps.emplace_back(number_field(c, "weight", "gmm component"),
                           vector_from_json(c.at("mean"), "gmm component mean"),
                           matrix_from_json(c.at("cov"), "gmm component cov"));
      return UncertaintySpec::gmm(std::move(comps));
    }
    if (kind == "uniform_box")
      return UncertaintySpec::uniform_box(vector_from_json(j.at("lower"), "box lower"),
                                          vector_from_json(j.at("upper"), "box upper"));
    if (kind == "ellipsoid")
      return UncertaintySpec::ellipsoid(vector_from_json(j.at("center"), "ellipsoid center"),
                                        matrix_from_json(j.at("shape"), "ellipsoid shape"));
    throw Error("uncertainty: unknown kind \"" + kind + "\"");
  }();
  if (j.contains("drift"))
    spec = spec.with_linear_drift(vector_from_json(j["drift"], "drift"));
  return spec;
}

Json expansion_to_json(const Expansion& e) {
  return Json{{"kernel", kernel_to_json(e.kernel)},
              {"points", matrix_to_json(e.points)},
              {"weights", vector_to_json(e.weights)}};
}

Expansion expansion_from_json(const Json& j) {
  return make_expansion(kernel_from_json(j.at("kernel")),
                        matrix_from_json(j.at("points"), "expansion points"),
                        vector_from_json(j.at("weights"), "expansion weights"));
}

}  // namespace kmedyn
