#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "eis/convergence_lab.hpp"
#include "eis/symbol_analysis.hpp"
#include "test_support.hpp"

using namespace eis;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.push_back("");
  return out;
}

double truncation_rate(const SchemeSpec& spec, bool boundary_part) {
  const auto p = make_problem(spec.bc == BoundaryKind::periodic ? "exp-cos-periodic" : "exp-cos-ibvp");
  std::vector<double> s, te;
  for (int n : {32, 64, 128}) {
    const BlockGrid g = spec.bc == BoundaryKind::periodic ? periodic_grid(n, 1.0) : ibvp_grid(n, 1.0);
    const TruncationProfile prof = truncation_vector(build_operator(g, spec), *p, 0.3);
    s.push_back(g.spacing());
    te.push_back(boundary_part ? prof.boundary_max() : prof.interior_norm());
  }
  return test::slope(s, te);
}

StudyConfig small_study() {
  StudyConfig cfg;
  cfg.bc = BoundaryKind::dirichlet;
  cfg.c_values = {-0.25, 0.0};
  cfg.n_values = {16, 8, 32};
  cfg.t_end = 0.02;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("error norm and observed order") {
  Eigen::VectorXd a(4), b(4);
  a << 1, 2, 3, 4;
  b << 1, 2, 3, 6;
  CHECK(error_norm(a, b, 0.25) == doctest::Approx(1.0));
  CHECK(error_norm(a, a, 0.1) == 0.0);
  CHECK_THROWS_AS(error_norm(a, Eigen::VectorXd::Zero(3), 0.1), std::invalid_argument);
  CHECK(observed_order({8e-3, 1e-3, 1.25e-4}, {0.4, 0.2, 0.1}) == doctest::Approx(3.0));
  CHECK(observed_order({1.0, 0.25}, {1.0, 0.5}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(observed_order({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(observed_order({1.0, 0.0}, {1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(observed_order({1.0, 0.5}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("interior truncation error is first order for c != 0 and second order for c = 0") {
  for (auto bc : {BoundaryKind::periodic, BoundaryKind::dirichlet}) {
    CAPTURE(to_string(bc));
    CHECK(truncation_rate(SchemeSpec{StencilOrder::second_block, bc, -0.25}, false) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(truncation_rate(SchemeSpec{StencilOrder::second_block, bc, 1.0 / 6.0}, false) ==
          doctest::Approx(1.0).epsilon(0.1));
    CHECK(truncation_rate(SchemeSpec{StencilOrder::second_block, bc, 0.0}, false) == doctest::Approx(2.0).epsilon(0.05));
  }
  CHECK(truncation_rate(SchemeSpec{StencilOrder::fourth_block, BoundaryKind::periodic, 4.0 / 13.0}, false) ==
        doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("boundary truncation is confined to the closure rows") {
  const auto p = make_problem("exp-cos-ibvp");
  const BlockGrid g = ibvp_grid(16, 1.0);
  const TruncationProfile prof =
      truncation_vector(build_operator(g, SchemeSpec{StencilOrder::second_block, BoundaryKind::dirichlet, -0.25}), *p, 0.3);
  int nonzero = 0;
  for (Eigen::Index i = 0; i < prof.boundary.size(); ++i) {
    const bool near_end = i < 2 || i >= prof.boundary.size() - 2;
    if (!near_end) CHECK(std::abs(prof.boundary[i]) <= 1e-9);
    if (std::abs(prof.boundary[i]) > 1e-9) ++nonzero;
  }
  CHECK(nonzero == 4);
  CHECK(std::count(prof.interior.begin(), prof.interior.end(), false) == 4);
  // Dirichlet closure error u(-a) - ghost = O(a^6)/s^2 = O(s^4) for fourth-block
  // and O(a^4)/s^2 = O(s^2) for second-block.
  CHECK(truncation_rate(SchemeSpec{StencilOrder::second_block, BoundaryKind::dirichlet, -0.25}, true) ==
        doctest::Approx(2.0).epsilon(0.075));
  CHECK(truncation_rate(SchemeSpec{StencilOrder::fourth_block, BoundaryKind::dirichlet, 4.0 / 13.0}, true) ==
        doctest::Approx(4.0).epsilon(0.075));
  // Periodic operators have no boundary part.
  const TruncationProfile per = truncation_vector(
      build_operator(periodic_grid(16, 1.0), SchemeSpec{StencilOrder::second_block, BoundaryKind::periodic, -0.25}),
      *make_problem("exp-cos-periodic"), 0.3);
  CHECK(per.boundary_max() <= 1e-9);
}

TEST_CASE("study rows are grouped, sorted and fitted") {
  const ConvergenceReport r = run_study(small_study());
  REQUIRE(r.rows.size() == 6);
  REQUIRE(r.groups.size() == 2);
  CHECK(r.problem == "exp-cos-ibvp");
  CHECK(r.kappa == 0.1);
  CHECK(r.rows[0].n == 8);
  CHECK(r.rows[1].n == 16);
  CHECK(r.rows[2].n == 32);
  CHECK(r.rows[0].c == -0.25);
  CHECK(r.rows[3].c == 0.0);
  CHECK_FALSE(r.rows[0].observed_order);
  CHECK(r.rows[1].observed_order);
  // Cumulative fits: two rows give the pairwise order, three the LS slope.
  CHECK(*r.rows[1].observed_order == doctest::Approx(*r.rows[1].pairwise_order));
  CHECK(*r.rows[2].observed_order ==
        doctest::Approx(test::slope({r.rows[0].s, r.rows[1].s, r.rows[2].s},
                                    {r.rows[0].error, r.rows[1].error, r.rows[2].error})));
  CHECK(r.group(0.0)->fitted_order == r.rows[5].observed_order);
  CHECK(r.group(0.3) == nullptr);
  // Each row agrees with a standalone run.
  const auto p = make_problem("exp-cos-ibvp");
  const ReportRow single =
      run_case(SchemeSpec{StencilOrder::second_block, BoundaryKind::dirichlet, 0.0}, 16, *p, 0.02, StepPolicy{0.1});
  CHECK(r.rows[4].error == single.error);
}

TEST_CASE("studies are deterministic across thread counts") {
  StudyConfig cfg = small_study();
  const ConvergenceReport one = run_study(cfg);
  cfg.threads = 3;
  const ConvergenceReport three = run_study(cfg);
  std::ostringstream a, b;
  write_csv(one, a);
  write_csv(three, b);
  CHECK(a.str() == b.str());
}

TEST_CASE("study failures propagate") {
  StudyConfig cfg = small_study();
  cfg.kappa = 40.0;
  cfg.t_end = 1.0;
  cfg.n_values = {32};
  CHECK_THROWS_AS(run_study(cfg), NumericalInstability);
  cfg = small_study();
  cfg.n_values = {7};
  CHECK_THROWS_AS(run_study(cfg), std::invalid_argument);
  cfg = small_study();
  cfg.c_values.clear();
  CHECK_THROWS_AS(run_study(cfg), std::invalid_argument);
}

TEST_CASE("CSV schema") {
  const ConvergenceReport r = run_study(small_study());
  std::ostringstream os;
  write_csv(r, os);
  const auto lines = split(os.str(), '\n');
  REQUIRE(lines.size() == 8);  // header, six rows, trailing empty
  CHECK(lines[0] == kReportCsvHeader);
  CHECK(lines.back().empty());
  for (std::size_t i = 1; i <= 6; ++i) {
    const auto cols = split(lines[i], ',');
    REQUIRE(cols.size() == 7);
    CHECK(cols[0] == "second-block");
    CHECK(cols[1] == "dirichlet");
    CHECK(std::stod(cols[4]) == r.rows[i - 1].s);
    CHECK(std::stod(cols[5]) == r.rows[i - 1].error);  // round-trips exactly
    if (r.rows[i - 1].observed_order) {
      CHECK(std::stod(cols[6]) == doctest::Approx(*r.rows[i - 1].observed_order).epsilon(1e-6));
    } else {
      CHECK(cols[6].empty());
    }
  }
  CHECK(split(lines[1], ',')[2] == "-0.25");
}

TEST_CASE("JSON report") {
  const ConvergenceReport r = run_study(small_study());
  const nlohmann::json j = to_json(r);
  CHECK(j["metadata"]["problem"] == "exp-cos-ibvp");
  CHECK(j["metadata"]["t_end"] == 0.02);
  REQUIRE(j["rows"].size() == 6);
  CHECK(j["rows"][0]["observed_order"].is_null());
  CHECK(j["rows"][2]["N"] == 32);
  CHECK(j["rows"][2]["error"].get<double>() == r.rows[2].error);
  CHECK(j["groups"].size() == 2);
  const nlohmann::json back = nlohmann::json::parse(j.dump());
  CHECK(back == j);
  std::ostringstream table;
  print_table(r, table);
  CHECK(split(table.str(), '\n').size() == 8);  // header, six rows, trailing empty
}

TEST_CASE("N = 6 symbol table at c = -1/4") {
  const SymbolTable t = symbol_table(-0.25);
  CHECK(t.periodic.size() == 24);
  REQUIRE(t.rows.size() == 7);
  const SymbolTableRow& zero = t.rows[0];
  REQUIRE(zero.dirichlet.size() == 1);
  CHECK(std::abs(zero.dirichlet[0] + 87.5415) < 1e-4);
  REQUIRE(zero.neumann.size() == 1);
  CHECK(std::abs(zero.neumann[0]) <= 1e-9);
  const SymbolTableRow& six = t.rows[6];
  REQUIRE(six.neumann.size() == 1);
  CHECK(std::abs(six.neumann[0] + 43.7708) < 1e-4);
  for (int w = 1; w <= 5; ++w) {
    const SymbolTableRow& row = t.rows[static_cast<std::size_t>(w)];
    REQUIRE(row.dirichlet.size() == 2);
    CHECK(row.dirichlet == row.neumann);
    const SymbolPair q = interior_symbols(w, pi / 6.0, -0.25);
    CHECK(row.dirichlet[0] == doctest::Approx(q.parasitic));
    CHECK(row.dirichlet[1] == doctest::Approx(q.physical));
  }
  // Against the dense eigenvalues of both operators.
  const BlockGrid g = ibvp_grid(6, pi);
  for (auto bc : {BoundaryKind::dirichlet, BoundaryKind::neumann}) {
    std::vector<double> tabled;
    for (const auto& row : t.rows) {
      const auto& col = bc == BoundaryKind::dirichlet ? row.dirichlet : row.neumann;
      tabled.insert(tabled.end(), col.begin(), col.end());
    }
    const auto dense =
        test::dense_real_eigenvalues(build_operator(g, SchemeSpec{StencilOrder::second_block, bc, -0.25}).matrix());
    CHECK(test::max_relative_gap(dense, tabled) <= 1e-9);
  }
  const nlohmann::json j = to_json(t);
  CHECK(j["rows"].size() == 7);
  std::ostringstream os;
  print_symbol_table(t, os);
  CHECK(os.str().find("-87.5415") != std::string::npos);
}

TEST_CASE("modal error decomposition") {
  const BlockGrid g = periodic_grid(16, 2.0 * pi);
  const DiscreteOperator op = build_operator(g, SchemeSpec{StencilOrder::second_block, BoundaryKind::periodic, -0.25});
  const ModalBasis b = assemble_modal_basis(16, -0.25, SpectrumSplit::periodic_half);
  // A single real mode: psi_1(2) + conj = psi_1(2) + psi_1(-2).
  const Eigen::VectorXd e = (b.psi.col(2 * 6) + b.psi.col(2 * 10)).real();
  const Eigen::VectorXd coeff = modal_error(op, e);
  CHECK(coeff.size() == 34);
  CHECK(coeff[12] == doctest::Approx(1.0));
  CHECK(coeff[20] == doctest::Approx(1.0));
  CHECK(coeff.sum() == doctest::Approx(2.0));
  CHECK_THROWS_AS(modal_error(build_operator(ibvp_grid(8, pi), SchemeSpec{StencilOrder::second_block,
                                                                          BoundaryKind::dirichlet, 0.0}),
                              Eigen::VectorXd::Zero(16)),
                  std::invalid_argument);
}
