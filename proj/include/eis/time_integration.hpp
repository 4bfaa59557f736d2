#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "eis/manufactured_problems.hpp"
#include "eis/spatial_operators.hpp"

namespace eis {

/// Length of the classical RK4 stability interval on the negative real axis.
inline constexpr double kRk4RealStabilityLimit = 2.78;

/// Raised when a stage produces a non-finite value.
class NumericalInstability : public std::runtime_error {
 public:
  NumericalInstability(const std::string& what, double t) : std::runtime_error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Fixed step dt = kappa s^2; the last step is shortened to land on t_end.
struct StepPolicy {
  double kappa = 0.1;

  static StepPolicy for_order(StencilOrder order) {
    return StepPolicy{order == StencilOrder::second_block ? 0.1 : 0.05};
  }
  double step(double spacing) const { return kappa * spacing * spacing; }
};

/// out = f(t, state)
using RhsFunction = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

Eigen::VectorXd rk4_step(const RhsFunction& rhs, const Eigen::VectorXd& state, double t, double dt);

/// Integrates v' = Q v + B(t) + F(t) from the projection of the exact
/// solution at t = 0 up to t_end.
Eigen::VectorXd integrate(const DiscreteOperator& op, const ManufacturedProblem& problem, double t_end,
                          const StepPolicy& policy);

/// Largest |lambda| dt over the symbols of the interior scheme, to be compared
/// with kRk4RealStabilityLimit.
double rk4_stability_number(const SchemeSpec& spec, double spacing, const StepPolicy& policy);

/// Least-squares temporal order of RK4 on u' = -u over [0, 1] at
/// dt = 0.1, 0.05, 0.025.
double rk4_order_check();

/// Same, for a scalar problem u' = f(t, u) with exact solution u(t_end).
double rk4_order_check(const std::function<double(double, double)>& f, double u0, double t_end, double exact,
                       double dt0);

}  // namespace eis
