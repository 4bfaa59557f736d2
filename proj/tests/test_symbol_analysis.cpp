#include "doctest.h"

#include <cmath>
#include <numbers>

#include "eis/spatial_operators.hpp"
#include "eis/symbol_analysis.hpp"
#include "test_support.hpp"

using namespace eis;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);
const double kStableC[] = {0.0, -0.25, 1.0 / 6.0, -1.0 / 6.0};

std::vector<double> split_spectrum(const BlockStencil& stencil, const BlockGrid& grid, SpectrumSplit split) {
  std::vector<double> out;
  for (int omega : split_frequencies(grid.blocks(), split)) {
    const SymbolRecord rec = eigvec_coefficients(stencil, grid, omega, split);
    out.push_back(rec.q1.real());
    out.push_back(rec.q2.real());
  }
  return out;
}

}  // namespace

TEST_CASE("aliases coincide on even points and flip sign on odd points") {
  for (int n : {6, 16}) {
    const BlockGrid g = periodic_grid(n, 2.0 * pi);
    const auto freqs = split_frequencies(n, SpectrumSplit::periodic_half);
    CHECK(freqs.size() == static_cast<std::size_t>(n + 1));
    for (int omega : freqs) {
      const FrequencyPair p = split_frequency(omega, n, SpectrumSplit::periodic_half);
      CHECK(std::abs(p.omega - p.nu) == n + 1);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const cplx a = std::exp(I * (p.omega * g[i]));
        const cplx b = std::exp(I * (p.nu * g[i]));
        CHECK(std::abs(a - (i % 2 == 0 ? b : -b)) <= 1e-12);
      }
    }
  }
  // IBVP split: nu = omega -+ 2N differ by the factors -+i on the quarter grid.
  const BlockGrid g = ibvp_grid(8, pi);
  CHECK(split_frequencies(8, SpectrumSplit::ibvp).size() == 16);
  const FrequencyPair p = split_frequency(3, 8, SpectrumSplit::ibvp);
  CHECK(p.nu == -13);
  CHECK(split_frequency(-3, 8, SpectrumSplit::ibvp).nu == 13);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx ratio = std::exp(I * (p.nu * g[i])) / std::exp(I * (p.omega * g[i]));
    CHECK(std::abs(ratio - (i % 2 == 0 ? -I : I)) <= 1e-12);
  }
}

TEST_CASE("closed-form symbols") {
  // c = 0: both rows are the three-point stencil, Q1 = -(2 - 2 cos theta)/s^2.
  for (double theta : {0.1, 0.7, 1.3}) {
    const double s = 0.2;
    const SymbolPair q = symbols_at_phase(theta, s, 0.0);
    CHECK(q.physical == doctest::Approx(-(2.0 - 2.0 * std::cos(theta)) / (s * s)));
    CHECK(q.parasitic == doctest::Approx(-(2.0 + 2.0 * std::cos(theta)) / (s * s)));
  }
  // Reference values on [0, pi] with N = 6 at c = -1/4.
  const SymbolPair q6 = interior_symbols(6, pi / 6.0, -0.25);
  CHECK(q6.physical == doctest::Approx(-29.1805).epsilon(1e-5));
  CHECK(q6.parasitic == doctest::Approx(-43.7708).epsilon(1e-5));
  const SymbolPair q0 = interior_symbols(0, pi / 6.0, -0.25);
  CHECK(q0.physical == 0.0);
  CHECK(q0.parasitic == doctest::Approx(-87.5415).epsilon(1e-5));
  CHECK_THROWS_AS(interior_symbols(1, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("Bloch symbols match the closed form") {
  for (double c : kStableC) {
    for (double theta : {0.05, 0.4, 1.0, 1.5}) {
      const double s = 0.1;
      const auto bloch = bloch_symbols(block_stencil(StencilOrder::second_block, c), theta, s);
      const SymbolPair q = symbols_at_phase(theta, s, c);
      CHECK(bloch[0].real() == doctest::Approx(q.physical).epsilon(1e-10));
      CHECK(bloch[1].real() == doctest::Approx(q.parasitic).epsilon(1e-10));
      CHECK(std::abs(bloch[0].imag()) <= 1e-9 * std::abs(q.parasitic));
    }
  }
  const auto zero = bloch_symbols(block_stencil(StencilOrder::second_block, -0.25), 0.0, 0.1);
  CHECK(zero[0] == cplx(0.0, 0.0));
}

TEST_CASE("split spectrum equals the dense periodic spectrum") {
  for (auto order : {StencilOrder::second_block, StencilOrder::fourth_block}) {
    for (int n : {6, 16}) {
      for (double c : {0.0, -0.25, 1.0 / 6.0, -1.0 / 6.0, 4.0 / 13.0}) {
        const BlockGrid g = periodic_grid(n, 2.0 * pi);
        const BlockStencil st = block_stencil(order, c);
        const DiscreteOperator op = build_periodic(g, SchemeSpec{order, BoundaryKind::periodic, c});
        CAPTURE(n);
        CAPTURE(c);
        CHECK(test::max_relative_gap(test::dense_real_eigenvalues(op.matrix()),
                                     split_spectrum(st, g, SpectrumSplit::periodic_half)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("eigenvector coefficients are normalized and phase fixed") {
  for (auto split : {SpectrumSplit::periodic_half, SpectrumSplit::ibvp}) {
    for (double c : kStableC) {
      for (int omega : split_frequencies(16, split)) {
        const SymbolRecord r = eigvec_coefficients(omega, split == SpectrumSplit::ibvp ? pi / 16 : 2 * pi / 17, c, split);
        CHECK(std::norm(r.alpha1) + std::norm(r.beta1) == doctest::Approx(1.0));
        CHECK(std::norm(r.alpha2) + std::norm(r.beta2) == doctest::Approx(1.0));
        CHECK(r.alpha1.imag() == doctest::Approx(0.0).scale(1.0));
        CHECK(r.beta2.imag() == doctest::Approx(0.0).scale(1.0));
        CHECK(r.alpha1.real() >= 0.0);
        CHECK(r.beta2.real() >= 0.0);
      }
    }
  }
}

TEST_CASE("eigenvector ratios match the closed form") {
  for (auto split : {SpectrumSplit::periodic_half, SpectrumSplit::ibvp}) {
    const int n = 16;
    const double h = split == SpectrumSplit::ibvp ? pi / n : 2.0 * pi / (n + 1);
    for (double c : {-0.25, 1.0 / 6.0, -1.0 / 6.0}) {
      for (int omega : split_frequencies(n, split)) {
        const SymbolRecord rec = eigvec_coefficients(omega, h, c, split);
        const auto closed = closed_form_ratios(rec.theta, c, split);
        if (!closed) continue;
        CAPTURE(omega);
        CAPTURE(c);
        CHECK(std::abs(rec.beta1 / rec.alpha1 - (*closed)[0]) <= 1e-9 * std::max(1.0, std::abs((*closed)[0])));
        CHECK(std::abs(rec.beta2 / rec.alpha2 - (*closed)[1]) <= 1e-9 * std::max(1.0, std::abs((*closed)[1])));
      }
    }
  }
  CHECK_FALSE(closed_form_ratios(0.4, 0.0, SpectrumSplit::periodic_half));
  CHECK_FALSE(closed_form_ratios(0.0, -0.25, SpectrumSplit::periodic_half));
}

TEST_CASE("c = 0 gives the pure Fourier basis") {
  for (int omega : split_frequencies(16, SpectrumSplit::periodic_half)) {
    const SymbolRecord r = eigvec_coefficients(omega, 2.0 * pi / 17.0, 0.0, SpectrumSplit::periodic_half);
    CHECK(std::abs(r.alpha1 - 1.0) <= 1e-12);
    CHECK(std::abs(r.beta1) <= 1e-12);
    CHECK(std::abs(r.alpha2) <= 1e-12);
    CHECK(std::abs(r.beta2 - 1.0) <= 1e-12);
  }
}

TEST_CASE("modal basis diagonalizes the periodic operator within the norm bounds") {
  for (int n : {6, 16, 32}) {
    for (double c : kStableC) {
      const ModalBasis b = assemble_modal_basis(n, c, SpectrumSplit::periodic_half);
      CAPTURE(n);
      CAPTURE(c);
      CHECK(b.norm_psi <= b.psi_bound());
      CHECK(b.norm_psi_inverse <= b.psi_inverse_bound());
      CHECK(b.min_determinant > 0.9);
      CHECK(b.min_determinant <= 1.0 + 1e-12);
      // Q Psi = Psi Lambda against the operator assembled independently.
      const BlockGrid g = periodic_grid(n, 2.0 * pi);
      const DiscreteOperator op = build_periodic(g, SchemeSpec{StencilOrder::second_block, BoundaryKind::periodic, c});
      const Eigen::MatrixXcd lhs = op.matrix().cast<cplx>() * b.psi;
      const Eigen::MatrixXcd rhs = b.psi * b.eigenvalues.asDiagonal();
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9 * b.eigenvalues.cwiseAbs().maxCoeff());
    }
  }
  CHECK_THROWS_AS(assemble_modal_basis(block_stencil(StencilOrder::second_block, 0.0), ibvp_grid(8, pi),
                                       SpectrumSplit::periodic_half),
                  std::invalid_argument);
}

TEST_CASE("coefficient determinant against the closed-form ratios") {
  // |alpha1 beta2 - alpha2 beta1| = |r2 - r1| / (sqrt(1 + |r1|^2) sqrt(1 + |r2|^2)).
  for (double c : {-1.0, -0.25, 1.0 / 6.0, 0.3, 0.37}) {
    const ModalBasis b = assemble_modal_basis(32, c, SpectrumSplit::periodic_half);
    for (const SymbolRecord& r : b.records) {
      const auto closed = closed_form_ratios(r.theta, c, SpectrumSplit::periodic_half);
      if (!closed) continue;
      const cplx r1 = (*closed)[0], r2 = (*closed)[1];
      const double expected = std::abs(r2 - r1) / (std::sqrt(1.0 + std::norm(r1)) * std::sqrt(1.0 + std::norm(r2)));
      CHECK(std::abs(r.determinant()) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
  // The 0.9 floor holds up to c = 0.3036 only; past it the minimum keeps falling.
  CHECK(assemble_modal_basis(32, 0.3, SpectrumSplit::periodic_half).min_determinant > 0.9);
  CHECK(assemble_modal_basis(32, 0.37, SpectrumSplit::periodic_half).min_determinant ==
        doctest::Approx(0.81).epsilon(0.01));
}

TEST_CASE("reflected IBVP eigenpairs satisfy Q phi = lambda phi") {
  for (auto order : {StencilOrder::second_block, StencilOrder::fourth_block}) {
    for (auto bc : {BoundaryKind::dirichlet, BoundaryKind::neumann}) {
      for (double c : {0.0, -0.25, 4.0 / 13.0}) {
        for (int n : {6, 16}) {
          const BlockGrid g = ibvp_grid(n, pi);
          const SchemeSpec spec{order, bc, c};
          const DiscreteOperator op = build_operator(g, spec);
          const auto pairs = ibvp_eigenpairs(g, spec);
          CHECK(pairs.size() == static_cast<std::size_t>(2 * n));
          for (const IbvpEigenpair& e : pairs) {
            const Eigen::VectorXd r = op.matrix() * e.vector - e.eigenvalue * e.vector;
            CAPTURE(e.omega);
            CAPTURE(e.branch);
            CHECK(std::sqrt(g.spacing()) * r.norm() <= 1e-9 * std::max(1.0, std::abs(e.eigenvalue)));
            CHECK(g.spacing() * e.vector.squaredNorm() == doctest::Approx(1.0));
          }
        }
      }
    }
  }
  CHECK_THROWS_AS(ibvp_eigenpairs(periodic_grid(8, pi), SchemeSpec{}), std::invalid_argument);
}

TEST_CASE("low-mode symbol error model") {
  CHECK(error_model_coefficient(-0.25) == 0.0);
  CHECK(error_model_coefficient(0.0) == doctest::Approx(1.0 / 12.0));
  CHECK_THROWS(error_model_coefficient(0.5));
  // Fourth-order Taylor coefficient of Q1 from the closed form at omega = 1:
  // g(s) = (Q1 + 1) / s^2 = coefficient + O(s^2), Richardson-extrapolated.
  for (double c : kStableC) {
    auto g = [c](double s) { return (symbols_at_phase(s, s, c).physical + 1.0) / (s * s); };
    const double extrapolated = (4.0 * g(0.02) - g(0.04)) / 3.0;
    CHECK(std::abs(extrapolated - error_model_coefficient(c)) <= 1e-5);
  }
}

TEST_CASE("expansion residuals decay at the expected rates") {
  const std::vector<double> hs{0.4, 0.2, 0.1};
  auto rate = [&](double c, auto field) {
    std::vector<double> err;
    for (double h : hs) err.push_back(field(expansion_residuals(1, h, c)));
    return test::slope(hs, err);
  };
  CHECK(rate(-0.25, [](const ExpansionResiduals& r) { return std::abs(r.q1_minus_leading); }) ==
        doctest::Approx(4.0).epsilon(0.05));
  CHECK(rate(0.0, [](const ExpansionResiduals& r) { return std::abs(r.q1_minus_leading); }) ==
        doctest::Approx(2.0).epsilon(0.05));
  for (double c : {1.0 / 6.0, -1.0 / 6.0}) {
    CAPTURE(c);
    CHECK(rate(c, [](const ExpansionResiduals& r) { return std::abs(r.q1_minus_model); }) ==
          doctest::Approx(4.0).epsilon(0.05));
    CHECK(rate(c, [](const ExpansionResiduals& r) { return std::abs(r.q2_minus_model); }) ==
          doctest::Approx(2.0).epsilon(0.05));
    CHECK(rate(c, [](const ExpansionResiduals& r) { return r.alpha1_minus_model; }) ==
          doctest::Approx(8.0).epsilon(0.05));
    CHECK(rate(c, [](const ExpansionResiduals& r) { return r.beta1_minus_model; }) ==
          doctest::Approx(5.0).epsilon(0.05));
    CHECK(rate(c, [](const ExpansionResiduals& r) { return r.alpha2_minus_model; }) ==
          doctest::Approx(3.0).epsilon(0.05));
    CHECK(rate(c, [](const ExpansionResiduals& r) { return r.beta2_minus_model; }) ==
          doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("spectral radius") {
  // Three-point stencil: max |symbol| = 4 / s^2 at theta = pi/2.
  const double s = 0.05;
  CHECK(spectral_radius(block_stencil(StencilOrder::second_block, 0.0), s) == doctest::Approx(4.0 / (s * s)));
  // At theta = 0 the parasitic branch is (-4 + 8c)/s^2.
  CHECK(spectral_radius(block_stencil(StencilOrder::second_block, -0.25), s) >= 6.0 / (s * s) - 1e-9);
}
