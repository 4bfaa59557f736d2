#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "eis/block_grid.hpp"
#include "eis/spatial_operators.hpp"

namespace eis {

using cplx = std::complex<double>;

/// How each frequency omega is paired with its alias nu.
enum class SpectrumSplit {
  periodic_half,  // nu = omega - (N+1) for omega > 0, omega + (N+1) otherwise
  ibvp,           // nu = omega - 2N for omega > 0, omega + 2N otherwise
};

struct FrequencyPair {
  int omega;
  int nu;
};

FrequencyPair split_frequency(int omega, int n, SpectrumSplit split);
/// Frequencies omega enumerated by the split: -N/2..N/2 or -N+1..N.
std::vector<int> split_frequencies(int n, SpectrumSplit split);

/// Physical (-> -omega^2) and parasitic (O(1/s^2)) symbols.
struct SymbolPair {
  double physical;
  double parasitic;
};

/// Closed-form second-block symbols at phase theta = omega k0 s:
/// (-4 + 2c(cos 2theta + 3) +- Delta) / (2 s^2).  The physical branch takes +Delta.
SymbolPair symbols_at_phase(double theta, double spacing, double c);
double discriminant(double theta, double c);

/// Second-block symbols for unit fundamental wavenumber (domain 2 pi periodic,
/// or the pi-long IBVP), i.e. theta = omega h / 2.  omega = 0 gives
/// (0, (-4 + 8c)/s^2).
SymbolPair interior_symbols(int omega, double h, double c);

/// 2x2 Bloch matrix of a block stencil: G(p, q) collects the taps of row
/// parity p that land on parity q, weighted by e^{i k theta}.
Eigen::Matrix2cd bloch_matrix(const BlockStencil& stencil, double theta, double spacing);

/// Eigenvalues of the Bloch matrix, physical branch (larger real part) first.
std::array<cplx, 2> bloch_symbols(const BlockStencil& stencil, double theta, double spacing);

/// Largest |symbol| over theta in [0, pi], sampled.
double spectral_radius(const BlockStencil& stencil, double spacing, int samples = 2048);

/// Eigen-data of one omega of the split spectrum.
struct SymbolRecord {
  int omega = 0;
  int nu = 0;
  double theta = 0.0;  // omega k0 s
  cplx q1, q2;         // physical and parasitic symbols
  cplx r1, r2;         // beta_k / alpha_k
  cplx alpha1, beta1, alpha2, beta2;
  double delta = 0.0;  // second-block discriminant
  // Per-sublattice symbols of the pure modes: Q e^{i omega x} = diag(mu1, mu2,
  // ...) e^{i omega x}, Q e^{i nu x} = diag(sigma1, sigma2, ...) e^{i nu x}.
  cplx mu1, mu2, sigma1, sigma2;

  cplx determinant() const { return alpha1 * beta2 - alpha2 * beta1; }
};

/// Symbols and normalized eigenvector coefficients of psi_k = alpha_k e^{i omega x} +
/// beta_k e^{i nu x}.  Normalization: |alpha_k|^2 + |beta_k|^2 = 1 with alpha_1
/// and beta_2 real and non-negative.  `grid` fixes the sublattice offsets
/// and k0; `stencil` the scheme.
SymbolRecord eigvec_coefficients(const BlockStencil& stencil, const BlockGrid& grid, int omega, SpectrumSplit split);

/// Second-block convenience form for unit fundamental wavenumber: h is the
/// block width, the periodic-half split uses x_0 = 0 and the IBVP split
/// x_0 = h/4.
SymbolRecord eigvec_coefficients(int omega, double h, double c, SpectrumSplit split);

/// The displayed closed-form ratio r_k for second-block schemes:
/// i((4-8c) cos theta -+ Delta) / (2c(2 sin theta + sin 2 theta)) on the
/// periodic-half split and ((-4+8c) cos theta +- Delta) / (same) on the IBVP
/// split (negated for theta < 0, where the alias phase flips).  Returns
/// std::nullopt when the denominator vanishes (c = 0 or theta in {0, pi}),
/// where the pure Fourier basis applies instead.
std::optional<std::array<cplx, 2>> closed_form_ratios(double theta, double c, SpectrumSplit split);

struct ModalBasis {
  Eigen::MatrixXcd psi;      // columns psi_1(omega), psi_2(omega), unit s-norm Fourier parts
  Eigen::MatrixXcd coefficients;  // block-diagonal A with 2x2 blocks [alpha1 alpha2; beta1 beta2]
  Eigen::MatrixXcd fourier_inverse;  // F^{-1}: columns e^{i omega x}, e^{i nu x}
  Eigen::VectorXcd eigenvalues;      // diagonal of Lambda, column-aligned with psi
  std::vector<SymbolRecord> records;
  double norm_psi = 0.0;          // ||Psi||_s = ||sqrt(s) Psi||_2
  double norm_psi_inverse = 0.0;  // ||Psi^{-1}||_2
  double norm_coefficients = 0.0;
  double min_determinant = 0.0;   // min over omega of |alpha1 beta2 - alpha2 beta1|
  double spacing = 0.0;

  double psi_bound() const;          // sqrt 2
  double psi_inverse_bound() const;  // 10 sqrt(2) / 9 sqrt(s)
};

/// Builds Psi = F^{-1} A over the full split spectrum.  With the periodic
/// split the basis lives on `grid`; with the IBVP split it lives on the
/// 4N-point reflected grid.
ModalBasis assemble_modal_basis(const BlockStencil& stencil, const BlockGrid& grid, SpectrumSplit split);
/// Second-block form on the 2 pi periodic grid (periodic split) or the
/// pi-long IBVP grid (IBVP split).
ModalBasis assemble_modal_basis(int n, double c, SpectrumSplit split);

struct IbvpEigenpair {
  int omega;    // frequency label, 0..N
  int branch;   // 1 physical, 2 parasitic
  double eigenvalue;
  Eigen::VectorXd vector;  // unit s-norm, sampled on the IBVP grid
};

/// Reflected eigenvectors phi_k(omega) = psi_k(omega) -+ R psi_k(omega) for
/// omega = 1..N-1 plus the two special modes: sin(2N k0 x) and sin(N k0 x) for
/// Dirichlet, the constant and cos(N k0 x) for Neumann.  2N pairs, sorted by
/// (omega, branch).
std::vector<IbvpEigenpair> ibvp_eigenpairs(const BlockGrid& grid, const SchemeSpec& spec);

/// (1 + 4c) / (12 - 24c): the leading coefficient of the low-mode symbol
/// error, Q1 = -omega^2 + coefficient omega^4 s^2 + O(s^4).  Throws at c = 1/2.
double error_model_coefficient(double c);

/// Differences between exact second-block symbols/coefficients and their
/// small-omega h expansions (unit fundamental wavenumber).
struct ExpansionResiduals {
  double q1_minus_leading;  // Q1 + omega^2
  double q1_minus_model;    // Q1 - (-omega^2 + coeff omega^4 s^2)
  double q2_minus_model;    // Q2 - (-(4 - 8c)/s^2 + (1 - 4c) omega^2)
  // Complex moduli of the coefficient differences, theta = omega h / 2:
  double alpha1_minus_model;  // alpha1 - (1 - c^2/(32(1-2c)^2) theta^6)
  double beta1_minus_model;   // beta1 - (-i c/(4 - 8c) theta^3)
  double alpha2_minus_model;  // alpha2 - i c/(2c - 1) theta
  double beta2_minus_model;   // beta2 - 1
};

ExpansionResiduals expansion_residuals(int omega, double h, double c);

}  // namespace eis
