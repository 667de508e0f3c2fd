#include "kmedyn/kernels.hpp"

#include <atomic>
#include <cmath>

namespace kmedyn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double ipow(double base, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= base;
  return r;
}

bool needs_norms(const KernelSpec& spec) {
  return std::holds_alternative<GaussianKernel>(spec.variant());
}

// Fills out[j] = k(x, Y_j) for the first m rows of Y. `dot` doubles as the
// output buffer. ynorm2 is required for the Gaussian kernel only. Returns
// false when the exponential cap is exceeded (no throwing here; callers may
// run this inside a parallel region).
bool kernel_rows(const KernelSpec& spec, const VectorXd& x, double xnorm2,
                 const PointSet& Y, const VectorXd& ynorm2, Eigen::Index m,
                 VectorXd& out) {
  if (m == 0) return true;
  out.head(m).noalias() = Y.topRows(m) * x;
  return std::visit(
      overloaded{
          [&](const LinearKernel&) { return true; },
          [&](const PolynomialKernel& k) {
            auto seg = out.head(m).array();
            seg += 1.0;
            if (k.degree > 1) {
              VectorXd base = out.head(m);
              for (int i = 1; i < k.degree; ++i) seg *= base.array();
            }
            return true;
          },
          [&](const GaussianKernel& k) {
            auto seg = out.head(m).array();
            // Squared distances, clamped at zero so k(x,x) is exactly 1.
            seg = (xnorm2 + ynorm2.head(m).array() - 2.0 * seg).max(0.0);
            seg = (-seg / (2.0 * k.bandwidth * k.bandwidth)).exp();
            return true;
          },
          [&](const ExponentialKernel& k) {
            if (out.head(m).maxCoeff() > k.cap) return false;
            out.head(m) = out.head(m).array().exp();
            return true;
          }},
      spec.variant());
}

// Diagonal entry k(x, x) from the squared norm.
double diag_kernel(const KernelSpec& spec, double xnorm2) {
  return std::visit(overloaded{[&](const LinearKernel&) { return xnorm2; },
                               [&](const PolynomialKernel& k) { return ipow(xnorm2 + 1.0, k.degree); },
                               [&](const GaussianKernel&) { return 1.0; },
                               [&](const ExponentialKernel& k) {
                                 if (xnorm2 > k.cap)
                                   throw Error("exponential kernel: dot product " +
                                               std::to_string(xnorm2) + " exceeds cap " +
                                               std::to_string(k.cap));
                                 return std::exp(xnorm2);
                               }},
                    spec.variant());
}

void check_points(const PointSet& X, const char* what) {
  require(X.rows() >= 1, std::string(what) + ": empty point set");
  require(X.allFinite(), std::string(what) + ": non-finite point coordinates");
}

[[noreturn]] void throw_exp_cap(const KernelSpec& spec) {
  const auto& k = std::get<ExponentialKernel>(spec.variant());
  throw Error("exponential kernel: dot product exceeds cap " + std::to_string(k.cap) +
              "; result would overflow");
}

}  // namespace

KernelSpec KernelSpec::linear() { return KernelSpec(LinearKernel{}); }

KernelSpec KernelSpec::polynomial(int degree) {
  require(degree >= 1, "polynomial kernel: degree must be >= 1, got " + std::to_string(degree));
  return KernelSpec(PolynomialKernel{degree});
}

KernelSpec KernelSpec::gaussian(double bandwidth) {
  require(std::isfinite(bandwidth) && bandwidth > 0.0,
          "gaussian kernel: bandwidth must be a positive real");
  return KernelSpec(GaussianKernel{bandwidth});
}

KernelSpec KernelSpec::exponential(double cap) {
  require(std::isfinite(cap) && cap > 0.0, "exponential kernel: cap must be a positive real");
  return KernelSpec(ExponentialKernel{cap});
}

std::string KernelSpec::label() const {
  return std::visit(
      overloaded{[](const LinearKernel&) { return std::string("linear"); },
                 [](const PolynomialKernel& k) {
                   return "polynomial_" + std::to_string(k.degree);
                 },
                 [](const GaussianKernel& k) {
                   char buf[48];
                   std::snprintf(buf, sizeof(buf), "gaussian_%g", k.bandwidth);
                   return std::string(buf);
                 },
                 [](const ExponentialKernel&) { return std::string("exponential"); }},
      v_);
}

double eval_kernel(const KernelSpec& spec, const VectorXd& x, const VectorXd& y) {
  require(x.size() == y.size(), "eval_kernel: dimension mismatch (" + std::to_string(x.size()) +
                                    " vs " + std::to_string(y.size()) + ")");
  require(x.size() >= 1, "eval_kernel: empty point");
  require(x.allFinite() && y.allFinite(), "eval_kernel: non-finite input");

  const double dot = x.dot(y);
  return std::visit(
      overloaded{[&](const LinearKernel&) { return dot; },
                 [&](const PolynomialKernel& k) { return ipow(dot + 1.0, k.degree); },
                 [&](const GaussianKernel& k) {
                   const double sqdist = std::max(0.0, (x - y).squaredNorm());
                   return std::exp(-sqdist / (2.0 * k.bandwidth * k.bandwidth));
                 },
                 [&](const ExponentialKernel& k) {
                   if (dot > k.cap) throw_exp_cap(spec);
                   return std::exp(dot);
                 }},
      spec.variant());
}

MatrixXd gram(const KernelSpec& spec, const PointSet& X, const PointSet& Y) {
  if (&X == &Y) return gram(spec, X);
  check_points(X, "gram");
  check_points(Y, "gram");
  require(X.cols() == Y.cols(), "gram: dimension mismatch (" + std::to_string(X.cols()) +
                                    " vs " + std::to_string(Y.cols()) + ")");

  const Eigen::Index n = X.rows(), m = Y.rows();
  const VectorXd ynorm2 =
      needs_norms(spec) ? VectorXd(Y.rowwise().squaredNorm()) : VectorXd();
  MatrixXd G(n, m);
  std::atomic<bool> overflow{false};

#pragma omp parallel if (n * m > 16384)
  {
    VectorXd row(m);
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      const VectorXd xi = X.row(i);
      if (!kernel_rows(spec, xi, needs_norms(spec) ? xi.squaredNorm() : 0.0, Y, ynorm2, m, row))
        overflow.store(true, std::memory_order_relaxed);
      G.row(i) = row.transpose();
    }
  }
  if (overflow.load()) throw_exp_cap(spec);
  return G;
}

namespace {

// Diagonal dots equal the squared norms, so this makes diag_kernel no-throw
// for the rest of the call (kernel_rows still flags off-diagonal overflow).
void check_exp_diag(const KernelSpec& spec, const VectorXd& norms2) {
  if (const auto* k = std::get_if<ExponentialKernel>(&spec.variant()))
    if (norms2.maxCoeff() > k->cap) throw_exp_cap(spec);
}

}  // namespace

MatrixXd gram(const KernelSpec& spec, const PointSet& X) {
  check_points(X, "gram");
  const Eigen::Index n = X.rows();
  const VectorXd norms2 = X.rowwise().squaredNorm();
  check_exp_diag(spec, norms2);
  const VectorXd ynorm2 = needs_norms(spec) ? norms2 : VectorXd();
  MatrixXd G(n, n);
  std::atomic<bool> overflow{false};

#pragma omp parallel if (n * n > 16384)
  {
    VectorXd row(n);
#pragma omp for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) {
      const VectorXd xi = X.row(i);
      if (!kernel_rows(spec, xi, needs_norms(spec) ? norms2[i] : 0.0, X, ynorm2, i, row))
        overflow.store(true, std::memory_order_relaxed);
      G.row(i).head(i) = row.head(i).transpose();
    }
  }
  if (overflow.load()) throw_exp_cap(spec);
  for (Eigen::Index i = 0; i < n; ++i) {
    G(i, i) = diag_kernel(spec, norms2[i]);
    for (Eigen::Index j = 0; j < i; ++j) G(j, i) = G(i, j);  // mirror
  }
  return G;
}

double weighted_gram_sum(const KernelSpec& spec, const PointSet& X, const VectorXd& wx,
                         const PointSet& Y, const VectorXd& wy) {
  check_points(X, "weighted_gram_sum");
  check_points(Y, "weighted_gram_sum");
  require(X.cols() == Y.cols(), "weighted_gram_sum: point dimension mismatch");
  require(wx.size() == X.rows() && wy.size() == Y.rows(),
          "weighted_gram_sum: weight length mismatch");

  const Eigen::Index n = X.rows(), m = Y.rows();
  const VectorXd ynorm2 =
      needs_norms(spec) ? VectorXd(Y.rowwise().squaredNorm()) : VectorXd();
  VectorXd partial(n);
  std::atomic<bool> overflow{false};

#pragma omp parallel if (n * m > 16384)
  {
    VectorXd row(m);
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      const VectorXd xi = X.row(i);
      if (!kernel_rows(spec, xi, needs_norms(spec) ? xi.squaredNorm() : 0.0, Y, ynorm2, m, row))
        overflow.store(true, std::memory_order_relaxed);
      partial[i] = wx[i] * row.dot(wy);
    }
  }
  if (overflow.load()) throw_exp_cap(spec);
  return partial.sum();
}

double weighted_gram_sum(const KernelSpec& spec, const PointSet& X, const VectorXd& w) {
  check_points(X, "weighted_gram_sum");
  require(w.size() == X.rows(), "weighted_gram_sum: weight length mismatch");

  const Eigen::Index n = X.rows();
  const VectorXd norms2 = X.rowwise().squaredNorm();
  check_exp_diag(spec, norms2);
  const VectorXd ynorm2 = needs_norms(spec) ? norms2 : VectorXd();
  VectorXd partial(n);
  std::atomic<bool> overflow{false};

#pragma omp parallel if (n * n > 16384)
  {
    VectorXd row(n);
#pragma omp for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) {
      const VectorXd xi = X.row(i);
      double offdiag = 0.0;
      if (i > 0) {
        if (!kernel_rows(spec, xi, needs_norms(spec) ? norms2[i] : 0.0, X, ynorm2, i, row))
          overflow.store(true, std::memory_order_relaxed);
        offdiag = row.head(i).dot(w.head(i));
      }
      partial[i] = w[i] * (2.0 * offdiag + diag_kernel(spec, norms2[i]) * w[i]);
    }
  }
  if (overflow.load()) throw_exp_cap(spec);
  return partial.sum();
}

}  // namespace kmedyn
