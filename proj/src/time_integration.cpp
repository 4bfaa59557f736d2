#include "eis/time_integration.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "eis/symbol_analysis.hpp"

namespace eis {

namespace {

void require_finite(const Eigen::VectorXd& v, double t, const char* stage) {
  if (!v.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite value in RK4 " << stage << " at t = " << t;
    throw NumericalInstability(msg.str(), t);
  }
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double integrate_scalar(const std::function<double(double, double)>& f, double u0, double t_end, double dt) {
  const RhsFunction rhs = [&f](double t, const Eigen::VectorXd& u, Eigen::VectorXd& out) {
    out.resize(1);
    out[0] = f(t, u[0]);
  };
  Eigen::VectorXd u(1);
  u[0] = u0;
  const auto steps = static_cast<long>(std::llround(t_end / dt));
  double t = 0.0;
  for (long i = 0; i < steps; ++i) {
    u = rk4_step(rhs, u, t, dt);
    t = (i + 1) * dt;
  }
  return u[0];
}

}  // namespace

Eigen::VectorXd rk4_step(const RhsFunction& rhs, const Eigen::VectorXd& state, double t, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("RK4 step must be positive");
  Eigen::VectorXd k1, k2, k3, k4;
  rhs(t, state, k1);
  require_finite(k1, t, "stage 1");
  rhs(t + 0.5 * dt, state + 0.5 * dt * k1, k2);
  require_finite(k2, t, "stage 2");
  rhs(t + 0.5 * dt, state + 0.5 * dt * k2, k3);
  require_finite(k3, t, "stage 3");
  rhs(t + dt, state + dt * k3, k4);
  require_finite(k4, t, "stage 4");
  Eigen::VectorXd next = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  require_finite(next, t + dt, "update");
  return next;
}

Eigen::VectorXd integrate(const DiscreteOperator& op, const ManufacturedProblem& problem, double t_end,
                          const StepPolicy& policy) {
  if (t_end < 0.0) throw std::invalid_argument("t_end must be non-negative");
  const BlockGrid& grid = op.grid();
  Eigen::VectorXd state = project(problem, grid, 0.0);
  if (t_end == 0.0) return state;

  const double dt_nominal = policy.step(grid.spacing());
  if (!(dt_nominal > 0.0)) throw std::invalid_argument("time step must be positive");
  const bool periodic = op.spec().bc == BoundaryKind::periodic;
  const BoundaryData boundary = periodic ? BoundaryData{} : problem.boundary_data(op.spec().bc);
  const auto sampler = problem.forcing_sampler(grid);

  // Forcing plus boundary vector, cached by time: consecutive steps share an
  // endpoint and the two midpoint stages share a time.
  struct Source {
    double t = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd value;
  };
  Source slots[2];
  int next_slot = 0;
  auto source_at = [&](double t) -> const Eigen::VectorXd& {
    for (const Source& s : slots) {
      if (s.t == t) return s.value;
    }
    Source& s = slots[next_slot];
    next_slot ^= 1;
    s.value.resize(static_cast<Eigen::Index>(grid.size()));
    sampler(t, s.value);
    if (!periodic) op.add_boundary_vector(t, boundary, s.value);
    s.t = t;
    return s.value;
  };

  const RhsFunction rhs = [&](double t, const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    out.resize(v.size());
    op.apply(v, out);
    out += source_at(t);
  };

  const auto full_steps = static_cast<long>(std::floor(t_end / dt_nominal * (1.0 + 1e-12)));
  double t = 0.0;
  for (long i = 0; i < full_steps; ++i) {
    try {
      state = rk4_step(rhs, state, t, dt_nominal);
    } catch (const NumericalInstability& e) {
      std::ostringstream msg;
      msg << e.what() << " (c = " << op.spec().c << ", N = " << grid.blocks() << ", dt = " << dt_nominal << ")";
      throw NumericalInstability(msg.str(), e.time());
    }
    t = static_cast<double>(i + 1) * dt_nominal;
  }
  const double remainder = t_end - t;
  if (remainder > 1e-14 * t_end) state = rk4_step(rhs, state, t, remainder);
  return state;
}

double rk4_stability_number(const SchemeSpec& spec, double spacing, const StepPolicy& policy) {
  return spectral_radius(block_stencil(spec.order, spec.c), spacing) * policy.step(spacing);
}

double rk4_order_check() {
  return rk4_order_check([](double, double u) { return -u; }, 1.0, 1.0, std::exp(-1.0), 0.1);
}

double rk4_order_check(const std::function<double(double, double)>& f, double u0, double t_end, double exact,
                       double dt0) {
  std::vector<double> log_dt, log_err;
  for (double dt : {dt0, dt0 / 2.0, dt0 / 4.0}) {
    log_dt.push_back(std::log(dt));
    log_err.push_back(std::log(std::abs(integrate_scalar(f, u0, t_end, dt) - exact)));
  }
  return least_squares_slope(log_dt, log_err);
}

}  // namespace eis
