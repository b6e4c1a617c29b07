#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

namespace sparsetd {

// One input pool: a uniform grid of Gaussian receptive fields over [lo, hi].
// The grid has n_div + 1 units located at lo + i * (hi - lo) / n_div.
// sigma is the receptive-field width in normalized [0,1] units; a
// non-positive value means the default 1 / n_div.
struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  int n_div = 1;
  double sigma = 0.0;

  int units() const { return n_div + 1; }
  double effective_sigma() const { return sigma > 0.0 ? sigma : 1.0 / n_div; }
};

void validate_grid(const GridSpec& grid);

// Population-codes a scalar: unit i reads exp(-(v - i/n_div)^2 / (2 sigma^2))
// where v = (value - lo) / (hi - lo). A value exactly on a grid point drives
// that unit to 1.0. Values outside [lo, hi] by more than 1e-9 are an error;
// smaller excursions are clamped.
std::vector<double> encode_scalar(double value, const GridSpec& grid);

int encoded_size(std::span<const GridSpec> grids);

// Concatenation of the per-dimension encodings in declared order.
void encode_state(std::span<const double> state, std::span<const GridSpec> grids,
                  Eigen::VectorXd& out);
Eigen::VectorXd encode_state(std::span<const double> state,
                             std::span<const GridSpec> grids);

}  // namespace sparsetd
