#pragma once

#include <string>
#include <variant>

#include "kmedyn/common.hpp"

namespace kmedyn {

struct LinearKernel {
  bool operator==(const LinearKernel&) const = default;
};

struct PolynomialKernel {
  int degree = 2;  // p >= 1, k(x,y) = (x.y + 1)^p
  bool operator==(const PolynomialKernel&) const = default;
};

struct GaussianKernel {
  double bandwidth = 1.0;  // sigma > 0, k(x,y) = exp(-|x-y|^2 / (2 sigma^2))
  bool operator==(const GaussianKernel&) const = default;
};

/// k(x,y) = exp(x.y). Unbounded; dot products above `cap` are rejected
/// instead of silently overflowing to Inf.
struct ExponentialKernel {
  double cap = 700.0;
  bool operator==(const ExponentialKernel&) const = default;
};

/// Tagged description of a positive-definite kernel. Construct through the
/// factories, which validate parameters.
class KernelSpec {
public:
  using Variant =
      std::variant<LinearKernel, PolynomialKernel, GaussianKernel, ExponentialKernel>;

  static KernelSpec linear();
  static KernelSpec polynomial(int degree);
  static KernelSpec gaussian(double bandwidth);
  static KernelSpec exponential(double cap = 700.0);

  const Variant& variant() const { return v_; }

  /// Compact name used in CSV output, e.g. "gaussian_0.5", "polynomial_3".
  std::string label() const;

  bool operator==(const KernelSpec& other) const { return v_ == other.v_; }

private:
  explicit KernelSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Pointwise kernel evaluation k(x, y). Points must be finite and of equal
/// dimension.
double eval_kernel(const KernelSpec& spec, const VectorXd& x, const VectorXd& y);

/// Gram matrix G(i,j) = k(X_i, Y_j). Both sets must be nonempty, finite and
/// share one dimension.
MatrixXd gram(const KernelSpec& spec, const PointSet& X, const PointSet& Y);

/// Symmetric Gram matrix of one point set; only the upper triangle is
/// evaluated, the rest mirrored.
MatrixXd gram(const KernelSpec& spec, const PointSet& X);

/// wx' K(X,Y) wy without materializing K. Row blocks may be processed in
/// parallel; the reduction order is fixed by row index, so the result does not
/// depend on scheduling.
double weighted_gram_sum(const KernelSpec& spec, const PointSet& X, const VectorXd& wx,
                         const PointSet& Y, const VectorXd& wy);

/// w' K(X,X) w, exploiting symmetry.
double weighted_gram_sum(const KernelSpec& spec, const PointSet& X, const VectorXd& w);

}  // namespace kmedyn
