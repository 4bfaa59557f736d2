#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "eis/manufactured_problems.hpp"
#include "eis/spatial_operators.hpp"
#include "eis/time_integration.hpp"

namespace eis {

/// sqrt(s sum |v_j - u_j|^2)
double error_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& u, double s);

/// Least-squares slope of log(error) against log(spacing).
double observed_order(const std::vector<double>& errors, const std::vector<double>& spacings);

struct TruncationProfile {
  Eigen::VectorXd te;        // u_xx - (Q u + B) at every grid point
  Eigen::VectorXd boundary;  // te minus the interior-stencil defect; zero away from the ends
  std::vector<bool> interior;
  double spacing = 0.0;

  double interior_norm() const;  // s-weighted norm of te over interior rows
  double boundary_max() const;   // max |boundary|
};

/// Truncation error of the exact solution at time t.  The interior-stencil
/// defect applies the interior stencil to u sampled off the grid where needed.
TruncationProfile truncation_vector(const DiscreteOperator& op, const ManufacturedProblem& problem, double t);

struct StudyConfig {
  StencilOrder order = StencilOrder::second_block;
  BoundaryKind bc = BoundaryKind::periodic;
  std::vector<double> c_values{0.0, -0.25, 1.0 / 6.0, -1.0 / 6.0};
  std::vector<int> n_values{32, 64, 128};
  std::string problem;  // empty: exp-cos matching bc
  double length = 1.0;
  double t_end = 1.0;
  std::optional<double> kappa;  // default from StepPolicy::for_order
  unsigned threads = 0;         // 0: hardware concurrency
  NeumannClosure closure = NeumannClosure::mass_consistent;

  std::string problem_name() const;
  StepPolicy policy() const;
};

struct ReportRow {
  StencilOrder order;
  BoundaryKind bc;
  double c;
  int n;
  double s;
  double error;
  std::optional<double> pairwise_order;  // vs the previous row of the group
  std::optional<double> observed_order;  // least squares over the group's rows so far
};

struct ReportGroup {
  double c;
  std::vector<std::size_t> rows;
  std::optional<double> fitted_order;
};

struct ConvergenceReport {
  std::vector<ReportRow> rows;
  std::vector<ReportGroup> groups;
  std::string problem;
  double t_end = 0.0;
  double kappa = 0.0;

  const ReportGroup* group(double c, double tol = 1e-12) const;
};

/// Integrates every (c, N) pair, possibly concurrently; rows come out grouped
/// by c in input order and sorted by N.  NumericalInstability propagates.
ConvergenceReport run_study(const StudyConfig& config);
/// A single row.
ReportRow run_case(const SchemeSpec& spec, int n, const ManufacturedProblem& problem, double t_end,
                   const StepPolicy& policy);

inline constexpr const char* kReportCsvHeader = "scheme,bc,c,N,s,error,observed_order";
void write_csv(const ConvergenceReport& report, std::ostream& out);
nlohmann::json to_json(const ConvergenceReport& report);
/// Fixed-width order table for terminals.
void print_table(const ConvergenceReport& report, std::ostream& out);

/// N = 6 eigenvalue table on the pi-long IBVP: the 24 symbols of the
/// reflected periodic problem and the Dirichlet/Neumann symbols per omega.
struct SymbolTableRow {
  int omega;
  std::vector<double> dirichlet;  // descending magnitude
  std::vector<double> neumann;
};

struct SymbolTable {
  double c = 0.0;
  int n = 6;
  std::vector<double> periodic;  // ascending
  std::vector<SymbolTableRow> rows;
};

SymbolTable symbol_table(double c, int n = 6);
inline SymbolTable n6_symbol_table(double c) { return symbol_table(c, 6); }
void print_symbol_table(const SymbolTable& table, std::ostream& out);
nlohmann::json to_json(const SymbolTable& table);

/// |coefficient| of the error on each Psi column (periodic operators only).
Eigen::VectorXd modal_error(const DiscreteOperator& op, const Eigen::VectorXd& error);

}  // namespace eis
