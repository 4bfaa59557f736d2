#include "eis/block_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace eis {

namespace {

void check_arguments(int n, int min_n, double length) {
  if (n < min_n) {
    throw std::invalid_argument("block count N must be at least " + std::to_string(min_n) + ", got " +
                                std::to_string(n));
  }
  if (n % 2 != 0) {
    throw std::invalid_argument("block count N must be even, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("domain length must be positive and finite");
  }
}

}  // namespace

const char* to_string(GridKind kind) {
  switch (kind) {
    case GridKind::periodic_half:
      return "periodic-half";
    case GridKind::ibvp_quarter:
      return "ibvp-quarter";
  }
  return "?";
}

double BlockGrid::wavenumber_unit() const {
  return (kind_ == GridKind::periodic_half ? 2.0 : 1.0) * std::numbers::pi / length_;
}

BlockGrid periodic_grid(int n, double length) {
  check_arguments(n, 2, length);
  const double h = length / (n + 1);
  std::vector<double> points(2 * static_cast<std::size_t>(n + 1));
  for (int j = 0; j <= n; ++j) {
    points[2 * j] = j * h;
    points[2 * j + 1] = j * h + h / 2.0;
  }
  return BlockGrid(GridKind::periodic_half, n, length, h, std::move(points));
}

BlockGrid ibvp_grid(int n, double length) {
  check_arguments(n, 4, length);
  const double h = length / n;
  std::vector<double> points(2 * static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    points[2 * j] = j * h + h / 4.0;
    points[2 * j + 1] = j * h + 3.0 * h / 4.0;
  }
  return BlockGrid(GridKind::ibvp_quarter, n, length, h, std::move(points));
}

std::vector<double> reflected_periodic_points(const BlockGrid& grid) {
  if (grid.kind() != GridKind::ibvp_quarter) {
    throw std::invalid_argument("reflection is defined for IBVP grids only");
  }
  const double period = 2.0 * grid.length();
  std::vector<double> out;
  out.reserve(2 * grid.size());
  for (double x : grid.points()) {
    out.push_back(x);
    out.push_back(std::fmod(period - x, period));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace eis
