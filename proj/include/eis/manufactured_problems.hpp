#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "eis/block_grid.hpp"
#include "eis/spatial_operators.hpp"

namespace eis {

enum class ProblemKind { periodic, ibvp };

/// Where closure traces come from: the PDE identities applied to g and F, or
/// the exact derivatives of u.
enum class TraceSource { pde, exact };

/// Closed-form solution u(x, t) of u_t = u_xx + F with F = u_t - u_xx.
class ManufacturedProblem {
 public:
  /// Highest total derivative order (x plus t) an implementation must provide.
  static constexpr int kMaxOrder = 5;

  virtual ~ManufacturedProblem() = default;

  virtual std::string name() const = 0;
  /// Domain length the problem is posed on.
  virtual double length() const = 0;
  /// d^{nx}/dx^{nx} d^{nt}/dt^{nt} u at (x, t), nx + nt <= kMaxOrder.
  virtual double partial(int nx, int nt, double x, double t) const = 0;

  double u(double x, double t) const { return partial(0, 0, x, t); }
  /// d^{nx}/dx^{nx} d^{nt}/dt^{nt} F, nx + nt + 2 <= kMaxOrder.
  double forcing(double x, double t, int nx = 0, int nt = 0) const {
    return partial(nx, nt + 1, x, t) - partial(nx + 2, nt, x, t);
  }

  /// F(x_i, t) on every grid point.
  void sample_forcing(const BlockGrid& grid, double t, Eigen::VectorXd& out) const;

  /// Writes F(x_i, t) into its second argument.  Implementations may
  /// precompute per-grid tables; the sampler copies what it needs from the
  /// grid but must not outlive the problem.
  using ForcingSampler = std::function<void(double, Eigen::VectorXd&)>;
  virtual ForcingSampler forcing_sampler(const BlockGrid& grid) const;

  /// Boundary data for the given boundary condition on [0, length()].
  BoundaryData boundary_data(BoundaryKind bc, TraceSource source = TraceSource::pde) const;
};

/// u = exp(cos(k (x - t))).  Periodic problems use L = 2 pi / k times an
/// integer; the defaults reproduce the experiments on [0, 1].
class ExpCosProblem final : public ManufacturedProblem {
 public:
  ExpCosProblem(ProblemKind kind, double wavenumber, double length = 1.0);

  std::string name() const override;
  double length() const override { return length_; }
  double partial(int nx, int nt, double x, double t) const override;
  ForcingSampler forcing_sampler(const BlockGrid& grid) const override;

  ProblemKind kind() const { return kind_; }
  double wavenumber() const { return k_; }

  /// n-th derivative of exp(cos(k xi)) with respect to xi, n <= 5.
  double profile_derivative(int n, double xi) const;

 private:
  ProblemKind kind_;
  double k_;
  double length_;
};

/// Steady u = sum_n a_n x^n with F = -u_xx; degree at most 5.
class PolynomialProblem final : public ManufacturedProblem {
 public:
  explicit PolynomialProblem(std::vector<double> coefficients, double length = 1.0);

  std::string name() const override;
  double length() const override { return length_; }
  double partial(int nx, int nt, double x, double t) const override;

  const std::vector<double>& coefficients() const { return coefficients_; }

 private:
  std::vector<double> coefficients_;
  double length_;
};

std::unique_ptr<ManufacturedProblem> exp_cos_problem(ProblemKind kind, double wavenumber, double length = 1.0);
std::unique_ptr<ManufacturedProblem> polynomial_problem(std::vector<double> coefficients, double length = 1.0);

/// Resolves "exp-cos-periodic", "exp-cos-ibvp" or "poly:a0,a1,...".
std::unique_ptr<ManufacturedProblem> make_problem(std::string_view name, double length = 1.0);

/// u(x_i, t) on every grid point.
Eigen::VectorXd project(const ManufacturedProblem& problem, const BlockGrid& grid, double t);

}  // namespace eis
