#include "eis/manufactured_problems.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace eis {

namespace {

void check_order(int nx, int nt) {
  if (nx < 0 || nt < 0 || nx + nt > ManufacturedProblem::kMaxOrder) {
    throw std::out_of_range("derivative order (" + std::to_string(nx) + ", " + std::to_string(nt) +
                            ") outside the supported range");
  }
}

EndpointTraces endpoint(const ManufacturedProblem& p, BoundaryKind bc, TraceSource source, double x, double t) {
  // Neumann data is g = u_x, so every g-derivative gains one x order.
  const int gx = bc == BoundaryKind::neumann ? 1 : 0;
  EndpointTraces e;
  e.value = p.partial(gx, 0, x, t);
  e.value_t = p.partial(gx, 1, x, t);
  e.value_tt = p.partial(gx, 2, x, t);
  e.forcing = p.forcing(x, t);
  e.forcing_x = p.forcing(x, t, 1, 0);
  e.forcing_xx = p.forcing(x, t, 2, 0);
  e.forcing_xxx = p.forcing(x, t, 3, 0);
  e.forcing_t = p.forcing(x, t, 0, 1);
  e.forcing_xt = p.forcing(x, t, 1, 1);
  if (source == TraceSource::exact) {
    e.u_xx = p.partial(2, 0, x, t);
    e.u_xxx = p.partial(3, 0, x, t);
    e.u_xxxx = p.partial(4, 0, x, t);
    e.u_xxxxx = p.partial(5, 0, x, t);
  }
  return e;
}

}  // namespace

void ManufacturedProblem::sample_forcing(const BlockGrid& grid, double t, Eigen::VectorXd& out) const {
  out.resize(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) out[static_cast<Eigen::Index>(i)] = forcing(grid[i], t);
}

ManufacturedProblem::ForcingSampler ManufacturedProblem::forcing_sampler(const BlockGrid& grid) const {
  return [this, grid](double t, Eigen::VectorXd& out) { sample_forcing(grid, t, out); };
}

BoundaryData ManufacturedProblem::boundary_data(BoundaryKind bc, TraceSource source) const {
  const double right = length();
  return [this, bc, source, right](double t) {
    return BoundarySample{endpoint(*this, bc, source, 0.0, t), endpoint(*this, bc, source, right, t)};
  };
}

ExpCosProblem::ExpCosProblem(ProblemKind kind, double wavenumber, double length)
    : kind_(kind), k_(wavenumber), length_(length) {
  if (!(wavenumber > 0.0) || !std::isfinite(wavenumber)) {
    throw std::invalid_argument("wavenumber must be positive");
  }
  if (!(length > 0.0)) throw std::invalid_argument("domain length must be positive");
  if (kind == ProblemKind::periodic) {
    const double periods = wavenumber * length / (2.0 * std::numbers::pi);
    if (std::abs(periods - std::round(periods)) > 1e-12 * std::max(1.0, periods)) {
      throw std::invalid_argument("periodic exp-cos problem needs k L to be a multiple of 2 pi");
    }
  }
}

std::string ExpCosProblem::name() const {
  return kind_ == ProblemKind::periodic ? "exp-cos-periodic" : "exp-cos-ibvp";
}

double ExpCosProblem::profile_derivative(int n, double xi) const {
  const double c = std::cos(k_ * xi);
  const double s = std::sin(k_ * xi);
  const double u = std::exp(c);
  const double s2 = s * s;
  const double k = k_;
  switch (n) {
    case 0:
      return u;
    case 1:
      return -k * s * u;
    case 2:
      return -k * k * (c - s2) * u;
    case 3:
      return k * k * k * s * (3.0 * c - s2 + 1.0) * u;
    case 4:
      return std::pow(k, 4) * (3.0 * c * c - 6.0 * c * s2 + c + s2 * s2 - 4.0 * s2) * u;
    case 5:
      return -std::pow(k, 5) * s * (15.0 * c * c - 10.0 * c * s2 + 15.0 * c + s2 * s2 - 10.0 * s2 + 1.0) * u;
    default:
      throw std::out_of_range("exp-cos derivatives are available through order 5");
  }
}

double ExpCosProblem::partial(int nx, int nt, double x, double t) const {
  check_order(nx, nt);
  // u depends on x - t only: each t derivative is a negated xi derivative.
  const double d = profile_derivative(nx + nt, x - t);
  return nt % 2 == 0 ? d : -d;
}

ManufacturedProblem::ForcingSampler ExpCosProblem::forcing_sampler(const BlockGrid& grid) const {
  // F = -f' - f'' = e^C (k S + k^2 (C - S^2)) with C, S = cos, sin(k(x - t)),
  // expanded by angle addition so only e^C is evaluated per point.
  Eigen::ArrayXd cos_kx(static_cast<Eigen::Index>(grid.size()));
  Eigen::ArrayXd sin_kx(cos_kx.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    cos_kx[static_cast<Eigen::Index>(i)] = std::cos(k_ * grid[i]);
    sin_kx[static_cast<Eigen::Index>(i)] = std::sin(k_ * grid[i]);
  }
  const double k = k_;
  return [cos_kx, sin_kx, k](double t, Eigen::VectorXd& out) {
    const double ct = std::cos(k * t);
    const double st = std::sin(k * t);
    out.resize(cos_kx.size());
    for (Eigen::Index i = 0; i < cos_kx.size(); ++i) {
      const double c = cos_kx[i] * ct + sin_kx[i] * st;
      const double s = sin_kx[i] * ct - cos_kx[i] * st;
      out[i] = std::exp(c) * (k * s + k * k * (c - s * s));
    }
  };
}

PolynomialProblem::PolynomialProblem(std::vector<double> coefficients, double length)
    : coefficients_(std::move(coefficients)), length_(length) {
  if (coefficients_.empty()) throw std::invalid_argument("polynomial needs at least one coefficient");
  if (coefficients_.size() > 6) {
    throw std::invalid_argument("polynomial degree " + std::to_string(coefficients_.size() - 1) +
                                " exceeds the supported maximum of 5");
  }
  if (!(length > 0.0)) throw std::invalid_argument("domain length must be positive");
}

std::string PolynomialProblem::name() const {
  std::ostringstream os;
  os.precision(17);
  os << "poly:";
  for (std::size_t i = 0; i < coefficients_.size(); ++i) os << (i ? "," : "") << coefficients_[i];
  return os.str();
}

double PolynomialProblem::partial(int nx, int nt, double x, double) const {
  check_order(nx, nt);
  if (nt > 0) return 0.0;
  // Horner on the nx-th derivative.
  double acc = 0.0;
  for (int n = static_cast<int>(coefficients_.size()) - 1; n >= nx; --n) {
    double falling = 1.0;
    for (int m = 0; m < nx; ++m) falling *= n - m;
    acc = acc * x + falling * coefficients_[static_cast<std::size_t>(n)];
  }
  return acc;
}

std::unique_ptr<ManufacturedProblem> exp_cos_problem(ProblemKind kind, double wavenumber, double length) {
  return std::make_unique<ExpCosProblem>(kind, wavenumber, length);
}

std::unique_ptr<ManufacturedProblem> polynomial_problem(std::vector<double> coefficients, double length) {
  return std::make_unique<PolynomialProblem>(std::move(coefficients), length);
}

std::unique_ptr<ManufacturedProblem> make_problem(std::string_view name, double length) {
  if (name == "exp-cos-periodic") {
    return exp_cos_problem(ProblemKind::periodic, 2.0 * std::numbers::pi / length, length);
  }
  if (name == "exp-cos-ibvp") return exp_cos_problem(ProblemKind::ibvp, std::numbers::pi / length, length);
  if (name.starts_with("poly:")) {
    std::vector<double> coefficients;
    std::string list(name.substr(5));
    std::istringstream is(list);
    std::string item;
    while (std::getline(is, item, ',')) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size()) {
        throw std::invalid_argument("bad polynomial coefficient '" + item + "'");
      }
      coefficients.push_back(value);
    }
    return polynomial_problem(std::move(coefficients), length);
  }
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

Eigen::VectorXd project(const ManufacturedProblem& problem, const BlockGrid& grid, double t) {
  if (t < 0.0) throw std::invalid_argument("projection time must be non-negative");
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) out[static_cast<Eigen::Index>(i)] = problem.u(grid[i], t);
  return out;
}

}  // namespace eis
