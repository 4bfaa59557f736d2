#include "eis/symbol_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace eis {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I{0.0, 1.0};

// Everything eigvec_coefficients needs about where the modes live.
struct ModeGeometry {
  double theta;     // omega k0 s
  double offset;    // x_0 / s
  double spacing;   // s
};

// The alias nu sits exactly pi away from omega in phase: nu k0 s = theta -+ pi
// on both splits.
double alias_shift(int omega) { return omega > 0 ? -pi : pi; }

cplx row_symbol(const std::vector<Tap>& taps, double theta) {
  cplx acc{0.0, 0.0};
  for (const Tap& t : taps) acc += t.weight * std::exp(I * (t.offset * theta));
  return acc;
}

// Unit eigenvector of a 2x2 matrix for eigenvalue lambda; `fallback` is used
// when the matrix is a multiple of the identity.
Eigen::Vector2cd eigenvector(const Eigen::Matrix2cd& m, cplx lambda, int fallback) {
  Eigen::Vector2cd a(m(0, 1), lambda - m(0, 0));
  Eigen::Vector2cd b(lambda - m(1, 1), m(1, 0));
  Eigen::Vector2cd v = a.norm() >= b.norm() ? a : b;
  const double scale = std::max({m.cwiseAbs().maxCoeff(), std::abs(lambda), 1e-300});
  if (v.norm() <= 1e-13 * scale) {
    v = Eigen::Vector2cd::Zero();
    v[fallback] = 1.0;
  }
  return v.normalized();
}

// Rotates v so that v[anchor] is real and non-negative.
void fix_phase(Eigen::Vector2cd& v, int anchor) {
  const double mag = std::abs(v[anchor]);
  if (mag > 0.0) v *= std::conj(v[anchor]) / mag;
  v[anchor] = std::abs(v[anchor]);
}

SymbolRecord coefficients_core(const BlockStencil& stencil, int omega, const ModeGeometry& g) {
  const double s = g.spacing;
  const double scale = 1.0 / (stencil.denominator * s * s);
  const double shift = alias_shift(omega);

  SymbolRecord rec;
  rec.omega = omega;
  rec.theta = g.theta;

  const Eigen::Matrix2cd bloch = bloch_matrix(stencil, g.theta, s);
  const auto symbols = bloch_symbols(stencil, g.theta, s);
  rec.q1 = symbols[0];
  rec.q2 = symbols[1];
  rec.delta = std::real(symbols[0] - symbols[1]) * s * s;

  rec.mu1 = row_symbol(stencil.first, g.theta) * scale;
  rec.mu2 = row_symbol(stencil.second, g.theta) * scale;
  rec.sigma1 = row_symbol(stencil.first, g.theta + shift) * scale;
  rec.sigma2 = row_symbol(stencil.second, g.theta + shift) * scale;

  // e^{i nu x} / e^{i omega x} on the two sublattices.
  const cplx rho_first = std::exp(I * (shift * g.offset));
  const cplx rho_second = std::exp(I * (shift * (g.offset + 1.0)));
  Eigen::Matrix2cd t;
  t << 1.0, rho_first, 1.0, rho_second;
  const Eigen::Matrix2cd m = t.inverse() * bloch * t;

  Eigen::Vector2cd v1 = eigenvector(m, rec.q1, 0);
  Eigen::Vector2cd v2 = eigenvector(m, rec.q2, 1);
  fix_phase(v1, 0);
  fix_phase(v2, 1);
  rec.alpha1 = v1[0];
  rec.beta1 = v1[1];
  rec.alpha2 = v2[0];
  rec.beta2 = v2[1];
  const cplx inf{std::numeric_limits<double>::infinity(), 0.0};
  rec.r1 = rec.alpha1 != 0.0 ? rec.beta1 / rec.alpha1 : inf;
  rec.r2 = rec.alpha2 != 0.0 ? rec.beta2 / rec.alpha2 : inf;
  return rec;
}

}  // namespace

FrequencyPair split_frequency(int omega, int n, SpectrumSplit split) {
  const int period = split == SpectrumSplit::periodic_half ? n + 1 : 2 * n;
  return {omega, omega > 0 ? omega - period : omega + period};
}

std::vector<int> split_frequencies(int n, SpectrumSplit split) {
  std::vector<int> out;
  const int lo = split == SpectrumSplit::periodic_half ? -n / 2 : -n + 1;
  const int hi = split == SpectrumSplit::periodic_half ? n / 2 : n;
  for (int w = lo; w <= hi; ++w) out.push_back(w);
  return out;
}

double discriminant(double theta, double c) {
  const double d2 = 2.0 * c * c * std::cos(4.0 * theta) + 38.0 * c * c +
                    8.0 * (c - 1.0) * (3.0 * c - 1.0) * std::cos(2.0 * theta) - 32.0 * c + 8.0;
  return std::sqrt(std::max(d2, 0.0));
}

SymbolPair symbols_at_phase(double theta, double spacing, double c) {
  const double base = -4.0 + 2.0 * c * (std::cos(2.0 * theta) + 3.0);
  const double delta = discriminant(theta, c);
  const double denom = 2.0 * spacing * spacing;
  return {(base + delta) / denom, (base - delta) / denom};
}

SymbolPair interior_symbols(int omega, double h, double c) {
  if (!(h > 0.0)) throw std::invalid_argument("block width must be positive");
  const double s = h / 2.0;
  if (omega == 0) return {0.0, (-4.0 + 8.0 * c) / (s * s)};
  return symbols_at_phase(omega * s, s, c);
}

Eigen::Matrix2cd bloch_matrix(const BlockStencil& stencil, double theta, double spacing) {
  const double scale = 1.0 / (stencil.denominator * spacing * spacing);
  Eigen::Matrix2cd g = Eigen::Matrix2cd::Zero();
  for (int p = 0; p < 2; ++p) {
    for (const Tap& t : stencil.row(static_cast<std::size_t>(p))) {
      const int q = ((p + t.offset) % 2 + 2) % 2;
      g(p, q) += t.weight * scale * std::exp(I * (t.offset * theta));
    }
  }
  return g;
}

std::array<cplx, 2> bloch_symbols(const BlockStencil& stencil, double theta, double spacing) {
  const Eigen::Matrix2cd g = bloch_matrix(stencil, theta, spacing);
  const cplx half_trace = 0.5 * (g(0, 0) + g(1, 1));
  const cplx det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  const cplx root = std::sqrt(half_trace * half_trace - det);
  cplx a = half_trace + root;
  cplx b = half_trace - root;
  if (a.real() < b.real()) std::swap(a, b);
  // Real symbols lose their imaginary rounding noise, and the zero symbol of
  // the constant mode its real rounding noise.
  const double tol = 1e-12 * std::max(std::abs(a), std::abs(b));
  if (std::abs(a.imag()) <= tol) a = a.real();
  if (std::abs(b.imag()) <= tol) b = b.real();
  if (std::abs(a) <= tol) a = 0.0;
  if (std::abs(b) <= tol) b = 0.0;
  return {a, b};
}

double spectral_radius(const BlockStencil& stencil, double spacing, int samples) {
  double r = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double theta = pi * i / samples;
    for (const cplx& q : bloch_symbols(stencil, theta, spacing)) r = std::max(r, std::abs(q));
  }
  return r;
}

SymbolRecord eigvec_coefficients(const BlockStencil& stencil, const BlockGrid& grid, int omega,
                                 SpectrumSplit split) {
  const bool periodic = split == SpectrumSplit::periodic_half;
  if (periodic != grid.is_periodic()) {
    throw std::invalid_argument("spectrum split does not match the grid kind");
  }
  const int n = grid.blocks();
  const int lo = periodic ? -n / 2 : -n + 1;
  const int hi = periodic ? n / 2 : n;
  if (omega < lo || omega > hi) {
    throw std::out_of_range("frequency " + std::to_string(omega) + " outside the split spectrum");
  }
  const double s = grid.spacing();
  SymbolRecord rec = coefficients_core(stencil, omega, {omega * grid.wavenumber_unit() * s, grid[0] / s, s});
  rec.nu = split_frequency(omega, n, split).nu;
  return rec;
}

SymbolRecord eigvec_coefficients(int omega, double h, double c, SpectrumSplit split) {
  if (!(h > 0.0)) throw std::invalid_argument("block width must be positive");
  const double s = h / 2.0;
  const double offset = split == SpectrumSplit::periodic_half ? 0.0 : 0.5;
  SymbolRecord rec =
      coefficients_core(block_stencil(StencilOrder::second_block, c), omega, {omega * s, offset, s});
  // nu as an integer needs N; h = 2 pi / (N+1) or pi / N.
  const double period = split == SpectrumSplit::periodic_half ? 2.0 * pi / h : pi / h * 2.0;
  const int p = static_cast<int>(std::lround(period));
  rec.nu = omega > 0 ? omega - p : omega + p;
  return rec;
}

std::optional<std::array<cplx, 2>> closed_form_ratios(double theta, double c, SpectrumSplit split) {
  const double denom = 2.0 * c * (2.0 * std::sin(theta) + std::sin(2.0 * theta));
  if (std::abs(denom) < 1e-14) return std::nullopt;
  const double delta = discriminant(theta, c);
  const double cs = std::cos(theta);
  if (split == SpectrumSplit::periodic_half) {
    return std::array<cplx, 2>{I * (((4.0 - 8.0 * c) * cs - delta) / denom),
                               I * (((4.0 - 8.0 * c) * cs + delta) / denom)};
  }
  // With x_0 = h/4 the alias phase e^{i(nu - omega) x_0} is -i for omega > 0
  // and +i otherwise, which makes the IBVP ratios even in theta.
  const double sign = theta < 0.0 ? -1.0 : 1.0;
  return std::array<cplx, 2>{cplx(sign * ((-4.0 + 8.0 * c) * cs + delta) / denom),
                             cplx(sign * ((-4.0 + 8.0 * c) * cs - delta) / denom)};
}

double ModalBasis::psi_bound() const { return std::sqrt(2.0); }

double ModalBasis::psi_inverse_bound() const { return 10.0 * std::sqrt(2.0) / 9.0 * std::sqrt(spacing); }

ModalBasis assemble_modal_basis(const BlockStencil& stencil, const BlockGrid& grid, SpectrumSplit split) {
  const bool periodic = split == SpectrumSplit::periodic_half;
  if (periodic != grid.is_periodic()) {
    throw std::invalid_argument("spectrum split does not match the grid kind");
  }
  const std::vector<double> points =
      periodic ? std::vector<double>(grid.points().begin(), grid.points().end()) : reflected_periodic_points(grid);
  const auto m = static_cast<Eigen::Index>(points.size());
  const double s = grid.spacing();
  const double k0 = grid.wavenumber_unit();
  const double norm = 1.0 / std::sqrt(static_cast<double>(m) * s);

  ModalBasis basis;
  basis.spacing = s;
  basis.psi.resize(m, m);
  basis.fourier_inverse.resize(m, m);
  basis.coefficients = Eigen::MatrixXcd::Zero(m, m);
  basis.eigenvalues.resize(m);
  basis.min_determinant = std::numeric_limits<double>::infinity();

  Eigen::Index col = 0;
  for (int omega : split_frequencies(grid.blocks(), split)) {
    SymbolRecord rec = eigvec_coefficients(stencil, grid, omega, split);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double x = points[static_cast<std::size_t>(i)];
      basis.fourier_inverse(i, col) = std::exp(I * (omega * k0 * x)) * norm;
      basis.fourier_inverse(i, col + 1) = std::exp(I * (rec.nu * k0 * x)) * norm;
    }
    basis.coefficients(col, col) = rec.alpha1;
    basis.coefficients(col + 1, col) = rec.beta1;
    basis.coefficients(col, col + 1) = rec.alpha2;
    basis.coefficients(col + 1, col + 1) = rec.beta2;
    basis.eigenvalues[col] = rec.q1;
    basis.eigenvalues[col + 1] = rec.q2;

    const Eigen::Matrix2cd block = basis.coefficients.block(col, col, 2, 2);
    Eigen::JacobiSVD<Eigen::Matrix2cd> block_svd(block);
    basis.norm_coefficients = std::max(basis.norm_coefficients, block_svd.singularValues()[0]);
    basis.min_determinant = std::min(basis.min_determinant, std::abs(rec.determinant()));
    basis.records.push_back(rec);
    col += 2;
  }
  basis.psi = basis.fourier_inverse * basis.coefficients;

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(basis.psi);
  const auto& sv = svd.singularValues();
  basis.norm_psi = std::sqrt(s) * sv[0];
  basis.norm_psi_inverse = 1.0 / sv[sv.size() - 1];
  return basis;
}

ModalBasis assemble_modal_basis(int n, double c, SpectrumSplit split) {
  const BlockGrid grid = split == SpectrumSplit::periodic_half ? periodic_grid(n, 2.0 * pi) : ibvp_grid(n, pi);
  return assemble_modal_basis(block_stencil(StencilOrder::second_block, c), grid, split);
}

namespace {

// Symbol of a Bloch vector with sublattice amplitudes (a, b) relative to
// e^{i phi x}: (G (a, b))_0 / a.
double bloch_eigenvalue(const BlockStencil& stencil, double theta, double s, const Eigen::Vector2cd& amp) {
  const Eigen::Vector2cd image = bloch_matrix(stencil, theta, s) * amp;
  const Eigen::Index k = std::abs(amp[0]) >= std::abs(amp[1]) ? 0 : 1;
  return std::real(image[k] / amp[k]);
}

Eigen::VectorXd to_unit_real(const Eigen::VectorXcd& v, double s) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  const cplx phase = std::conj(v[arg]) / std::abs(v[arg]);
  Eigen::VectorXd out = (v * phase).real();
  return out / std::sqrt(s * out.squaredNorm());
}

}  // namespace

std::vector<IbvpEigenpair> ibvp_eigenpairs(const BlockGrid& grid, const SchemeSpec& spec) {
  if (grid.kind() != GridKind::ibvp_quarter) throw std::invalid_argument("IBVP eigenpairs need an ibvp-quarter grid");
  if (spec.bc == BoundaryKind::periodic) throw std::invalid_argument("IBVP eigenpairs need Dirichlet or Neumann");
  const bool dirichlet = spec.bc == BoundaryKind::dirichlet;
  const BlockStencil stencil = block_stencil(spec.order, spec.c);
  const int n = grid.blocks();
  const double s = grid.spacing();
  const double k0 = grid.wavenumber_unit();
  const auto m = static_cast<Eigen::Index>(grid.size());
  const double x0 = grid[0];
  const double x1 = grid[1];

  std::vector<IbvpEigenpair> out;
  out.reserve(static_cast<std::size_t>(m));

  // omega = 0: sin(2N k0 x) (Dirichlet) or the constant (Neumann).
  {
    Eigen::VectorXcd v(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      v[i] = dirichlet ? cplx(std::sin(2 * n * k0 * grid[static_cast<std::size_t>(i)])) : cplx(1.0);
    }
    double lambda = 0.0;  // rows sum to zero, so the constant is exact
    if (dirichlet) {
      const Eigen::Vector2cd amp(std::exp(I * (2.0 * n * k0 * x0)), std::exp(I * (2.0 * n * k0 * x1)));
      lambda = bloch_eigenvalue(stencil, 0.0, s, amp);
    }
    out.push_back({0, dirichlet ? 2 : 1, lambda, to_unit_real(v, s)});
  }

  for (int omega = 1; omega < n; ++omega) {
    const SymbolRecord rec = eigvec_coefficients(stencil, grid, omega, SpectrumSplit::ibvp);
    const double gamma = dirichlet ? -1.0 : 1.0;
    for (int branch = 1; branch <= 2; ++branch) {
      const cplx alpha = branch == 1 ? rec.alpha1 : rec.alpha2;
      const cplx beta = branch == 1 ? rec.beta1 : rec.beta2;
      Eigen::VectorXcd v(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        const double x = grid[static_cast<std::size_t>(i)];
        const cplx psi = alpha * std::exp(I * (omega * k0 * x)) + beta * std::exp(I * (rec.nu * k0 * x));
        const cplx reflected = alpha * std::exp(-I * (omega * k0 * x)) + beta * std::exp(-I * (rec.nu * k0 * x));
        v[i] = psi + gamma * reflected;
      }
      const cplx q = branch == 1 ? rec.q1 : rec.q2;
      out.push_back({omega, branch, q.real(), to_unit_real(v, s)});
    }
  }

  // omega = N: sin(N k0 x) (Dirichlet) or cos(N k0 x) (Neumann).
  {
    const double gamma = dirichlet ? -1.0 : 1.0;
    const double theta = n * k0 * s;
    Eigen::VectorXcd v(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double x = grid[static_cast<std::size_t>(i)];
      v[i] = dirichlet ? cplx(std::sin(n * k0 * x)) : cplx(std::cos(n * k0 * x));
    }
    const Eigen::Vector2cd amp(1.0 + gamma * std::exp(-2.0 * I * (n * k0 * x0)),
                               1.0 + gamma * std::exp(-2.0 * I * (n * k0 * x1)));
    const double lambda = bloch_eigenvalue(stencil, theta, s, amp);
    const auto symbols = bloch_symbols(stencil, theta, s);
    const int branch = std::abs(lambda - symbols[0].real()) <= std::abs(lambda - symbols[1].real()) ? 1 : 2;
    out.push_back({n, branch, lambda, to_unit_real(v, s)});
  }
  return out;
}

double error_model_coefficient(double c) {
  if (c == 0.5) throw std::domain_error("error model coefficient has a pole at c = 1/2");
  return (1.0 + 4.0 * c) / (12.0 - 24.0 * c);
}

ExpansionResiduals expansion_residuals(int omega, double h, double c) {
  const SymbolPair q = interior_symbols(omega, h, c);
  const SymbolRecord rec = eigvec_coefficients(omega, h, c, SpectrumSplit::periodic_half);
  const double s = h / 2.0;
  const double w2 = static_cast<double>(omega) * omega;
  const double theta = omega * s;
  ExpansionResiduals r;
  r.q1_minus_leading = q.physical + w2;
  r.q1_minus_model = q.physical - (-w2 + error_model_coefficient(c) * w2 * w2 * s * s);
  r.q2_minus_model = q.parasitic - (-(4.0 - 8.0 * c) / (s * s) + (1.0 - 4.0 * c) * w2);
  const double one_m2c = 1.0 - 2.0 * c;
  r.alpha1_minus_model = std::abs(rec.alpha1 - (1.0 - c * c / (32.0 * one_m2c * one_m2c) * std::pow(theta, 6)));
  r.beta1_minus_model = std::abs(rec.beta1 - (-I * c / (4.0 - 8.0 * c) * std::pow(theta, 3)));
  r.alpha2_minus_model = std::abs(rec.alpha2 - I * c / (2.0 * c - 1.0) * theta);
  r.beta2_minus_model = std::abs(rec.beta2 - 1.0);
  return r;
}

}  // namespace eis
