#pragma once

#include <Eigen/Core>
#include <span>

namespace sparsetd {

// k-winners-take-all configuration. q in (0, 1) places the subtracted bias
// between the k-th and (k+1)-th largest net inputs.
struct KwtaSpec {
  int k = 1;
  double q = 0.25;
};

// b = eta'_k - q * (eta'_k - eta'_{k+1}), eta' sorted descending. Uses a
// partial selection of the top k+1 entries, O(n) expected time.
double kwta_bias(std::span<const double> eta, const KwtaSpec& spec);
double kwta_bias(const Eigen::VectorXd& eta, const KwtaSpec& spec);

// eta - b elementwise. For distinct inputs exactly k entries stay positive.
Eigen::VectorXd apply_kwta(const Eigen::VectorXd& eta, const KwtaSpec& spec);

}  // namespace sparsetd
