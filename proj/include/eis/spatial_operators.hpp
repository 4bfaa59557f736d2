#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "eis/block_grid.hpp"

namespace eis {

enum class StencilOrder { second_block, fourth_block };
enum class BoundaryKind { periodic, dirichlet, neumann };

/// How the highest-order term of the Neumann ghost relation is chosen.
///   taylor:          the plain Taylor series about the boundary.
///   mass_consistent: the last term is rescaled so that s sum(Q u + B)
///                    matches the midpoint rule for the integral of u_xx one
///                    order further; otherwise the constant mode, which never
///                    decays, caps the error at the truncation order.
/// Dirichlet closures are always Taylor.
enum class NeumannClosure { mass_consistent, taylor };

const char* to_string(StencilOrder order);
const char* to_string(BoundaryKind bc);
const char* to_string(NeumannClosure closure);
StencilOrder parse_stencil_order(std::string_view text);
BoundaryKind parse_boundary_kind(std::string_view text);
NeumannClosure parse_neumann_closure(std::string_view text);

/// Von Neumann stability of the interior scheme holds for c < 1/2.
inline constexpr double kVonNeumannBound = 0.5;
/// The eigenvector coefficient determinant stays in (0.9, 1] for c < 3/8.
inline constexpr double kDeterminantBound = 0.375;

struct SchemeSpec {
  StencilOrder order = StencilOrder::second_block;
  BoundaryKind bc = BoundaryKind::periodic;
  double c = 0.0;
  NeumannClosure closure = NeumannClosure::mass_consistent;

  bool violates_von_neumann() const { return c >= kVonNeumannBound; }
  bool violates_determinant_bound() const { return c >= kDeterminantBound; }
  /// Set when either bound is violated.  Construction is still allowed.
  bool stability_advisory() const { return violates_von_neumann() || violates_determinant_bound(); }
};

struct Tap {
  int offset;
  double weight;
};

/// Interior two-point-block stencil.  Row i of the operator uses `first` when
/// i is even and `second` when i is odd; entries are weight / (denominator s^2).
struct BlockStencil {
  std::vector<Tap> first;
  std::vector<Tap> second;
  double denominator = 1.0;

  const std::vector<Tap>& row(std::size_t i) const { return i % 2 == 0 ? first : second; }
  int reach() const;
};

BlockStencil block_stencil(StencilOrder order, double c);

/// Boundary values and forcing traces at one endpoint at a fixed time.  For
/// Dirichlet `value` is u, for Neumann it is u_x.  The `u_*` entries are exact
/// spatial derivative traces; when present they replace the PDE-derived ones.
struct EndpointTraces {
  std::optional<double> value;
  std::optional<double> value_t;
  std::optional<double> value_tt;
  std::optional<double> forcing;
  std::optional<double> forcing_x;
  std::optional<double> forcing_xx;
  std::optional<double> forcing_xxx;
  std::optional<double> forcing_t;
  std::optional<double> forcing_xt;
  std::optional<double> u_xx;
  std::optional<double> u_xxx;
  std::optional<double> u_xxxx;
  std::optional<double> u_xxxxx;
};

struct BoundarySample {
  EndpointTraces left;
  EndpointTraces right;
};

using BoundaryData = std::function<BoundarySample(double t)>;

/// g = 0 and F = 0 at both ends, with every accessor present.
BoundaryData homogeneous_boundary();

class MissingBoundaryData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-endpoint closure traces {g, u_xx, u_xxxx} (Dirichlet) or
/// {u_x, u_xxx, u_xxxxx} (Neumann).  Second-block closures leave the last
/// slot at zero.
struct ClosureTraces {
  std::array<double, 3> left{};
  std::array<double, 3> right{};
};

/// Evaluates the traces a closure needs, using u_xx = g_t - F,
/// u_xxxx = g_tt - F_t - F_xx (Dirichlet) and u_xxx = g_t - F_x,
/// u_xxxxx = g_tt - F_xt - F_xxx (Neumann) unless exact traces are supplied.
/// Throws MissingBoundaryData when a required accessor is absent.
ClosureTraces closure_traces(const SchemeSpec& spec, const BoundarySample& sample);

/// Semi-discrete operator v' = Q v + B(t) + F(t).
///
/// Q is kept dense for analysis and mirrored in a row-major sparse copy for
/// time stepping.  B(t) = W tau(t), with tau the six closure traces (left
/// then right) and W collected during ghost elimination.
class DiscreteOperator {
 public:
  using BoundaryWeights = Eigen::Matrix<double, Eigen::Dynamic, 6>;

  DiscreteOperator(BlockGrid grid, SchemeSpec spec, Eigen::MatrixXd matrix, BoundaryWeights boundary_weights);

  const BlockGrid& grid() const { return grid_; }
  const SchemeSpec& spec() const { return spec_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const BoundaryWeights& boundary_weights() const { return boundary_weights_; }
  std::size_t size() const { return grid_.size(); }

  Eigen::VectorXd boundary_vector(double t, const BoundaryData& data) const;
  /// out += B(t); a no-op for periodic operators.
  void add_boundary_vector(double t, const BoundaryData& data, Eigen::VectorXd& out) const;
  /// out = Q v
  void apply(const Eigen::VectorXd& v, Eigen::VectorXd& out) const;

 private:
  BlockGrid grid_;
  SchemeSpec spec_;
  Eigen::MatrixXd matrix_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> sparse_;
  BoundaryWeights boundary_weights_;
};

/// Circulant matrix of `stencil` on `points` equally spaced periodic nodes.
Eigen::MatrixXd circulant_block_matrix(const BlockStencil& stencil, std::size_t points, double spacing);

DiscreteOperator build_periodic(const BlockGrid& grid, const SchemeSpec& spec);
DiscreteOperator build_dirichlet(const BlockGrid& grid, const SchemeSpec& spec);
DiscreteOperator build_neumann(const BlockGrid& grid, const SchemeSpec& spec);
/// Dispatches on spec.bc.
DiscreteOperator build_operator(const BlockGrid& grid, const SchemeSpec& spec);

/// Q state + B(t) + forcing.
Eigen::VectorXd evaluate_rhs(const DiscreteOperator& op, const Eigen::VectorXd& state, double t,
                             const BoundaryData& data, const Eigen::VectorXd& forcing);
void evaluate_rhs(const DiscreteOperator& op, const Eigen::VectorXd& state, double t, const BoundaryData& data,
                  const Eigen::VectorXd& forcing, Eigen::VectorXd& out);

}  // namespace eis
