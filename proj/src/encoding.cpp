#include "sparsetd/encoding.hpp"

#include <cmath>
#include <string>

#include "sparsetd/errors.hpp"

namespace sparsetd {

namespace {
constexpr double kRangeTolerance = 1e-9;

// Writes the n_div + 1 unit activations for one scalar into out.
void encode_into(double value, const GridSpec& grid, double* out) {
  if (!std::isfinite(value)) {
    throw NonFiniteInput("encode_scalar: value = " + std::to_string(value));
  }
  if (value < grid.lo - kRangeTolerance || value > grid.hi + kRangeTolerance) {
    throw OutOfRange("encode_scalar: value " + std::to_string(value) +
                     " outside [" + std::to_string(grid.lo) + ", " +
                     std::to_string(grid.hi) + "]");
  }
  double v = (value - grid.lo) / (grid.hi - grid.lo);
  v = std::min(1.0, std::max(0.0, v));
  const double sigma = grid.effective_sigma();
  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
  const int n = grid.n_div;
  for (int i = 0; i <= n; ++i) {
    const double d = v - static_cast<double>(i) / n;
    out[i] = std::exp(-d * d * inv_two_sigma_sq);
  }
}
}  // namespace

void validate_grid(const GridSpec& grid) {
  if (!(grid.lo < grid.hi)) {
    throw InvalidValue("GridSpec: lo must be < hi");
  }
  if (grid.n_div < 1) {
    throw InvalidValue("GridSpec: n_div must be >= 1");
  }
  if (grid.sigma < 0.0) {
    throw InvalidValue("GridSpec: sigma must be positive (or 0 for default)");
  }
}

std::vector<double> encode_scalar(double value, const GridSpec& grid) {
  validate_grid(grid);
  std::vector<double> out(static_cast<size_t>(grid.units()));
  encode_into(value, grid, out.data());
  return out;
}

int encoded_size(std::span<const GridSpec> grids) {
  int total = 0;
  for (const auto& g : grids) total += g.units();
  return total;
}

void encode_state(std::span<const double> state, std::span<const GridSpec> grids,
                  Eigen::VectorXd& out) {
  if (state.size() != grids.size()) {
    throw DimensionMismatch("encode_state: " + std::to_string(state.size()) +
                            " state variables vs " + std::to_string(grids.size()) +
                            " grids");
  }
  out.resize(encoded_size(grids));
  int offset = 0;
  for (size_t d = 0; d < grids.size(); ++d) {
    encode_into(state[d], grids[d], out.data() + offset);
    offset += grids[d].units();
  }
}

Eigen::VectorXd encode_state(std::span<const double> state,
                             std::span<const GridSpec> grids) {
  Eigen::VectorXd out;
  encode_state(state, grids, out);
  return out;
}

}  // namespace sparsetd
