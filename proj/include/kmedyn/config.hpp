#pragma once

#include <json.hpp>

#include "kmedyn/embedding.hpp"
#include "kmedyn/kernels.hpp"
#include "kmedyn/uncertainty.hpp"

namespace kmedyn {

using Json = nlohmann::json;

// Kernel records: {"kind":"linear"}, {"kind":"polynomial","degree":3},
// {"kind":"gaussian","bandwidth":0.5}, {"kind":"exponential"[,"cap":700]}.
Json kernel_to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const Json& j);

// Uncertainty records, tagged by "kind": gaussian {mean, cov}, gmm
// {components:[{weight, mean, cov}]}, uniform_box {lower, upper}, ellipsoid
// {center, shape}. An optional "drift" vector attaches a linear time shift
// rate*t to any law.
Json uncertainty_to_json(const UncertaintySpec& spec);
UncertaintySpec uncertainty_from_json(const Json& j);

Json expansion_to_json(const Expansion& e);
Expansion expansion_from_json(const Json& j);

Json vector_to_json(const VectorXd& v);
VectorXd vector_from_json(const Json& j, const std::string& what);
Json matrix_to_json(const MatrixXd& m);
MatrixXd matrix_from_json(const Json& j, const std::string& what);

}  // namespace kmedyn
