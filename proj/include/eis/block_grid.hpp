#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eis {

enum class GridKind {
  periodic_half,  // x_j = j h, x_{j+1/2} = j h + h/2, N+1 blocks on [0, L)
  ibvp_quarter,   // x_{j+1/4} = j h + h/4, x_{j+3/4} = j h + 3h/4, N blocks on (0, L)
};

const char* to_string(GridKind kind);

/// Uniform grid of two-point blocks.
///
/// Point 2j is the first node of block j and point 2j+1 the second node;
/// consecutive nodes are always `spacing()` = h/2 apart.  Stencils only ever
/// see `spacing()`, so the domain length is free.
class BlockGrid {
 public:
  GridKind kind() const { return kind_; }
  /// The block count N as used in the grid definitions (not the number of
  /// blocks for the periodic grid, which is N+1).
  int blocks() const { return blocks_; }
  double length() const { return length_; }
  double block_width() const { return block_width_; }
  double spacing() const { return block_width_ / 2.0; }
  std::size_t size() const { return points_.size(); }
  std::span<const double> points() const { return points_; }
  double operator[](std::size_t i) const { return points_[i]; }

  /// Fundamental wavenumber of the Fourier modes e^{i omega k0 x} used in the
  /// symbol analysis: 2 pi / L on the periodic grid and pi / L on the IBVP
  /// grid (whose reflection is 2L-periodic).
  double wavenumber_unit() const;

  bool is_periodic() const { return kind_ == GridKind::periodic_half; }

 private:
  friend BlockGrid periodic_grid(int, double);
  friend BlockGrid ibvp_grid(int, double);

  BlockGrid(GridKind kind, int blocks, double length, double block_width, std::vector<double> points)
      : kind_(kind), blocks_(blocks), length_(length), block_width_(block_width), points_(std::move(points)) {}

  GridKind kind_;
  int blocks_;
  double length_;
  double block_width_;
  std::vector<double> points_;
};

/// 2(N+1) points with h = L/(N+1).  Requires N even, N >= 2, L > 0.
BlockGrid periodic_grid(int n, double length);

/// 2N points with h = L/N, no point on either boundary.  Requires N even,
/// N >= 4, L > 0.
BlockGrid ibvp_grid(int n, double length);

/// The 4N points obtained by reflecting an IBVP grid about x = 0 and taking
/// the result modulo 2L, sorted ascending in [0, 2L).
std::vector<double> reflected_periodic_points(const BlockGrid& grid);

}  // namespace eis
