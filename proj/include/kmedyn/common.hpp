#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace kmedyn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A point in state (or parameter) space.
using StatePoint = Eigen::VectorXd;

/// A batch of points, one per row.
using PointSet = Eigen::MatrixXd;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a trajectory leaves the finite range during evolution.
/// Carries the failing time (continuous) or step index cast to double
/// (discrete), and the realization index when raised inside a batch run.
class BlowupError : public Error {
public:
  BlowupError(const std::string& what, double time, long realization = -1)
      : Error(what), time_(time), realization_(realization) {}

  double time() const { return time_; }
  long realization() const { return realization_; }

private:
  double time_;
  long realization_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace kmedyn
