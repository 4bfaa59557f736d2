#include "eis/spatial_operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace eis {

const char* to_string(StencilOrder order) {
  return order == StencilOrder::second_block ? "second-block" : "fourth-block";
}

const char* to_string(BoundaryKind bc) {
  switch (bc) {
    case BoundaryKind::periodic:
      return "periodic";
    case BoundaryKind::dirichlet:
      return "dirichlet";
    case BoundaryKind::neumann:
      return "neumann";
  }
  return "?";
}

const char* to_string(NeumannClosure closure) {
  return closure == NeumannClosure::mass_consistent ? "mass-consistent" : "taylor";
}

StencilOrder parse_stencil_order(std::string_view text) {
  if (text == "second-block") return StencilOrder::second_block;
  if (text == "fourth-block") return StencilOrder::fourth_block;
  throw std::invalid_argument("unknown scheme '" + std::string(text) + "'");
}

BoundaryKind parse_boundary_kind(std::string_view text) {
  if (text == "periodic") return BoundaryKind::periodic;
  if (text == "dirichlet") return BoundaryKind::dirichlet;
  if (text == "neumann") return BoundaryKind::neumann;
  throw std::invalid_argument("unknown boundary condition '" + std::string(text) + "'");
}

NeumannClosure parse_neumann_closure(std::string_view text) {
  if (text == "mass-consistent") return NeumannClosure::mass_consistent;
  if (text == "taylor") return NeumannClosure::taylor;
  throw std::invalid_argument("unknown Neumann closure '" + std::string(text) + "'");
}

int BlockStencil::reach() const {
  int r = 0;
  for (const auto* taps : {&first, &second}) {
    for (const Tap& t : *taps) r = std::max(r, std::abs(t.offset));
  }
  return r;
}

BlockStencil block_stencil(StencilOrder order, double c) {
  BlockStencil s;
  if (order == StencilOrder::second_block) {
    // (u_{j-1/2} - 2u_j + u_{j+1/2}) + c(-u_{j-1/2} + 3u_j - 3u_{j+1/2} + u_{j+1})
    s.first = {{-1, 1.0 - c}, {0, -2.0 + 3.0 * c}, {1, 1.0 - 3.0 * c}, {2, c}};
    // (u_j - 2u_{j+1/2} + u_{j+1}) + c(u_{j-1/2} - 3u_j + 3u_{j+1/2} - u_{j+1})
    s.second = {{-2, c}, {-1, 1.0 - 3.0 * c}, {0, -2.0 + 3.0 * c}, {1, 1.0 - c}};
    s.denominator = 1.0;
  } else {
    // (-1, 16, -30, 16, -1) + c(-1, 5, -10, 10, -5, 1) anchored at j-1
    s.first = {{-2, -1.0 - c}, {-1, 16.0 + 5.0 * c}, {0, -30.0 - 10.0 * c},
               {1, 16.0 + 10.0 * c}, {2, -1.0 - 5.0 * c}, {3, c}};
    // (-1, 16, -30, 16, -1) + c(1, -5, 10, -10, 5, -1) anchored at j-1
    s.second = {{-3, c}, {-2, -1.0 - 5.0 * c}, {-1, 16.0 + 10.0 * c},
                {0, -30.0 - 10.0 * c}, {1, 16.0 + 5.0 * c}, {2, -1.0 - c}};
    s.denominator = 12.0;
  }
  return s;
}

BoundaryData homogeneous_boundary() {
  return [](double) {
    EndpointTraces zero{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, {}, {}, {}, {}};
    return BoundarySample{zero, zero};
  };
}

namespace {

double require(const std::optional<double>& value, const char* name, const char* side) {
  if (!value) {
    throw MissingBoundaryData(std::string("boundary data lacks ") + name + " at the " + side + " endpoint");
  }
  return *value;
}

std::array<double, 3> endpoint_closure_traces(const SchemeSpec& spec, const EndpointTraces& e, const char* side) {
  const bool fourth = spec.order == StencilOrder::fourth_block;
  std::array<double, 3> out{};
  out[0] = require(e.value, "value", side);
  if (spec.bc == BoundaryKind::dirichlet) {
    out[1] = e.u_xx ? *e.u_xx : require(e.value_t, "value_t", side) - require(e.forcing, "forcing", side);
    if (fourth) {
      out[2] = e.u_xxxx ? *e.u_xxxx
                        : require(e.value_tt, "value_tt", side) - require(e.forcing_t, "forcing_t", side) -
                              require(e.forcing_xx, "forcing_xx", side);
    }
  } else {
    out[1] = e.u_xxx ? *e.u_xxx : require(e.value_t, "value_t", side) - require(e.forcing_x, "forcing_x", side);
    if (fourth) {
      out[2] = e.u_xxxxx ? *e.u_xxxxx
                         : require(e.value_tt, "value_tt", side) - require(e.forcing_xt, "forcing_xt", side) -
                               require(e.forcing_xxx, "forcing_xxx", side);
    }
  }
  return out;
}

// A ghost value expressed as sign * u[mirror] + sum_k weights[k] * tau_k.
struct GhostRelation {
  int mirror;
  double sign;
  std::array<double, 6> weights{};
};

// Taylor expansions about the boundary of the ghost at distance a outside the
// domain and its mirror image at distance a inside:
//   Dirichlet: u(-a) = -u(a) + 2g + a^2 u_xx + a^4/12 u_xxxx
//   Neumann:   u(-a) =  u(a) - 2a u_x - a^3/3 u_xxx - a^5/60 u_xxxxx
// and the reflected forms at x = L.  Second-block closures keep the first two
// terms, fourth-block closures all three.  The mass-consistent Neumann closure
// rescales the last kept term: by -1 (second-block) and -7/57 (fourth-block)
// s sum(Q u + B) reproduces the midpoint rule for the integral of u_xx through
// s^2 and s^4 respectively.
constexpr double kMassConsistentThird = -1.0;
constexpr double kMassConsistentFifth = -7.0 / 57.0;

GhostRelation ghost_relation(int index, int points, double spacing, const SchemeSpec& spec) {
  const BoundaryKind bc = spec.bc;
  const StencilOrder order = spec.order;
  const bool left = index < 0;
  const double a = left ? (-index - 0.5) * spacing : (index - points + 0.5) * spacing;
  GhostRelation g;
  g.mirror = left ? -index - 1 : 2 * points - 1 - index;
  const std::size_t base = left ? 0 : 3;
  const bool fourth = order == StencilOrder::fourth_block;
  if (bc == BoundaryKind::dirichlet) {
    g.sign = -1.0;
    g.weights[base] = 2.0;
    g.weights[base + 1] = a * a;
    g.weights[base + 2] = fourth ? std::pow(a, 4) / 12.0 : 0.0;
  } else {
    const double dir = left ? -1.0 : 1.0;
    g.sign = 1.0;
    g.weights[base] = dir * 2.0 * a;
    const bool rescale = spec.closure == NeumannClosure::mass_consistent;
    const double third = rescale && !fourth ? kMassConsistentThird : 1.0;
    const double fifth = rescale ? kMassConsistentFifth : 1.0;
    g.weights[base + 1] = third * dir * std::pow(a, 3) / 3.0;
    g.weights[base + 2] = fourth ? fifth * dir * std::pow(a, 5) / 60.0 : 0.0;
  }
  return g;
}

void check_ibvp(const BlockGrid& grid, const SchemeSpec& spec, BoundaryKind expected) {
  if (grid.kind() != GridKind::ibvp_quarter) {
    throw std::invalid_argument(std::string(to_string(expected)) + " operator requires an ibvp-quarter grid");
  }
  if (spec.bc != expected) {
    throw std::invalid_argument(std::string("scheme boundary condition is ") + to_string(spec.bc) + ", expected " +
                                to_string(expected));
  }
  if (spec.order == StencilOrder::fourth_block && grid.size() < 10) {
    throw std::invalid_argument("fourth-block IBVP operator needs at least 10 grid points");
  }
}

DiscreteOperator build_ibvp(const BlockGrid& grid, const SchemeSpec& spec) {
  const BlockStencil stencil = block_stencil(spec.order, spec.c);
  const int n = static_cast<int>(grid.size());
  const double s = grid.spacing();
  const double scale = 1.0 / (stencil.denominator * s * s);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  DiscreteOperator::BoundaryWeights w = DiscreteOperator::BoundaryWeights::Zero(n, 6);
  for (int i = 0; i < n; ++i) {
    for (const Tap& tap : stencil.row(i)) {
      const double coef = tap.weight * scale;
      const int j = i + tap.offset;
      if (j >= 0 && j < n) {
        q(i, j) += coef;
        continue;
      }
      const GhostRelation g = ghost_relation(j, n, s, spec);
      q(i, g.mirror) += g.sign * coef;
      for (int k = 0; k < 6; ++k) w(i, k) += g.weights[k] * coef;
    }
  }
  return DiscreteOperator(grid, spec, std::move(q), std::move(w));
}

}  // namespace

ClosureTraces closure_traces(const SchemeSpec& spec, const BoundarySample& sample) {
  if (spec.bc == BoundaryKind::periodic) return {};
  return {endpoint_closure_traces(spec, sample.left, "left"), endpoint_closure_traces(spec, sample.right, "right")};
}

DiscreteOperator::DiscreteOperator(BlockGrid grid, SchemeSpec spec, Eigen::MatrixXd matrix,
                                   BoundaryWeights boundary_weights)
    : grid_(std::move(grid)),
      spec_(spec),
      matrix_(std::move(matrix)),
      sparse_(matrix_.sparseView()),
      boundary_weights_(std::move(boundary_weights)) {}

Eigen::VectorXd DiscreteOperator::boundary_vector(double t, const BoundaryData& data) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  add_boundary_vector(t, data, out);
  return out;
}

void DiscreteOperator::add_boundary_vector(double t, const BoundaryData& data, Eigen::VectorXd& out) const {
  if (spec_.bc == BoundaryKind::periodic) return;
  if (!data) throw MissingBoundaryData("no boundary data supplied for a non-periodic operator");
  const ClosureTraces traces = closure_traces(spec_, data(t));
  Eigen::Matrix<double, 6, 1> tau;
  tau << traces.left[0], traces.left[1], traces.left[2], traces.right[0], traces.right[1], traces.right[2];
  out.noalias() += boundary_weights_ * tau;
}

void DiscreteOperator::apply(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
  if (static_cast<std::size_t>(v.size()) != size()) {
    throw std::invalid_argument("state length " + std::to_string(v.size()) + " does not match operator size " +
                                std::to_string(size()));
  }
  out.noalias() = sparse_ * v;
}

Eigen::MatrixXd circulant_block_matrix(const BlockStencil& stencil, std::size_t points, double spacing) {
  if (points % 2 != 0) throw std::invalid_argument("block grids have an even number of points");
  if (points < static_cast<std::size_t>(2 * stencil.reach() + 2)) {
    throw std::invalid_argument("grid too small: periodic stencil would overlap itself");
  }
  const auto n = static_cast<Eigen::Index>(points);
  const double scale = 1.0 / (stencil.denominator * spacing * spacing);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const Tap& tap : stencil.row(static_cast<std::size_t>(i))) {
      const Eigen::Index j = ((i + tap.offset) % n + n) % n;
      q(i, j) += tap.weight * scale;
    }
  }
  return q;
}

DiscreteOperator build_periodic(const BlockGrid& grid, const SchemeSpec& spec) {
  if (grid.kind() != GridKind::periodic_half) {
    throw std::invalid_argument("periodic operator requires a periodic-half grid");
  }
  if (spec.bc != BoundaryKind::periodic) {
    throw std::invalid_argument(std::string("scheme boundary condition is ") + to_string(spec.bc) +
                                ", expected periodic");
  }
  if (grid.size() < 8) throw std::invalid_argument("periodic operator needs at least 8 grid points");
  Eigen::MatrixXd q = circulant_block_matrix(block_stencil(spec.order, spec.c), grid.size(), grid.spacing());
  auto w = DiscreteOperator::BoundaryWeights::Zero(static_cast<Eigen::Index>(grid.size()), 6);
  return DiscreteOperator(grid, spec, std::move(q), w);
}

DiscreteOperator build_dirichlet(const BlockGrid& grid, const SchemeSpec& spec) {
  check_ibvp(grid, spec, BoundaryKind::dirichlet);
  return build_ibvp(grid, spec);
}

DiscreteOperator build_neumann(const BlockGrid& grid, const SchemeSpec& spec) {
  check_ibvp(grid, spec, BoundaryKind::neumann);
  return build_ibvp(grid, spec);
}

DiscreteOperator build_operator(const BlockGrid& grid, const SchemeSpec& spec) {
  switch (spec.bc) {
    case BoundaryKind::periodic:
      return build_periodic(grid, spec);
    case BoundaryKind::dirichlet:
      return build_dirichlet(grid, spec);
    case BoundaryKind::neumann:
      return build_neumann(grid, spec);
  }
  throw std::invalid_argument("unknown boundary kind");
}

void evaluate_rhs(const DiscreteOperator& op, const Eigen::VectorXd& state, double t, const BoundaryData& data,
                  const Eigen::VectorXd& forcing, Eigen::VectorXd& out) {
  if (static_cast<std::size_t>(forcing.size()) != op.size()) {
    throw std::invalid_argument("forcing length does not match operator size");
  }
  op.apply(state, out);
  op.add_boundary_vector(t, data, out);
  out += forcing;
}

Eigen::VectorXd evaluate_rhs(const DiscreteOperator& op, const Eigen::VectorXd& state, double t,
                             const BoundaryData& data, const Eigen::VectorXd& forcing) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(op.size()));
  evaluate_rhs(op, state, t, data, forcing, out);
  return out;
}

}  // namespace eis
