#include "sparsetd/kwta.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sparsetd/errors.hpp"

namespace sparsetd {

double kwta_bias(std::span<const double> eta, const KwtaSpec& spec) {
  if (spec.k < 1) {
    throw InvalidValue("kwta_bias: k must be >= 1");
  }
  if (!(spec.q > 0.0 && spec.q < 1.0)) {
    throw InvalidValue("kwta_bias: q must be in (0, 1)");
  }
  const size_t n = eta.size();
  const size_t k = static_cast<size_t>(spec.k);
  if (n <= k) {
    throw TooFewUnits("kwta_bias: need at least k+1 = " + std::to_string(k + 1) +
                      " entries, got " + std::to_string(n));
  }

  // Scratch buffer reused across calls; nth_element would reorder the input.
  thread_local std::vector<double> scratch;
  scratch.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double v = eta[i];
    if (!std::isfinite(v)) {
      throw NonFiniteInput("kwta_bias: eta[" + std::to_string(i) + "]");
    }
    scratch[i] = v;
  }

  // After partitioning, scratch[k] holds the (k+1)-th largest value and the
  // first k slots hold the top k in some order.
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<long>(k),
                   scratch.end(), std::greater<double>());
  const double eta_k1 = scratch[k];
  const double eta_k =
      *std::min_element(scratch.begin(), scratch.begin() + static_cast<long>(k));
  return eta_k - spec.q * (eta_k - eta_k1);
}

double kwta_bias(const Eigen::VectorXd& eta, const KwtaSpec& spec) {
  return kwta_bias(std::span<const double>(eta.data(), static_cast<size_t>(eta.size())),
                   spec);
}

Eigen::VectorXd apply_kwta(const Eigen::VectorXd& eta, const KwtaSpec& spec) {
  const double b = kwta_bias(eta, spec);
  return eta.array() - b;
}

}  // namespace sparsetd
