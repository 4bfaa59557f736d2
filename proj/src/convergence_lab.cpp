#include "eis/convergence_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "eis/block_grid.hpp"
#include "eis/symbol_analysis.hpp"

namespace eis {

namespace {

std::string format_number(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

BlockGrid grid_for(BoundaryKind bc, int n, double length) {
  return bc == BoundaryKind::periodic ? periodic_grid(n, length) : ibvp_grid(n, length);
}

}  // namespace

double error_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& u, double s) {
  if (v.size() != u.size()) throw std::invalid_argument("error_norm: length mismatch");
  return std::sqrt(s * (v - u).squaredNorm());
}

double observed_order(const std::vector<double>& errors, const std::vector<double>& spacings) {
  if (errors.size() != spacings.size()) throw std::invalid_argument("observed_order: length mismatch");
  if (errors.size() < 2) throw std::invalid_argument("observed_order: need at least two rows");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(spacings[i] > 0.0)) {
      throw std::invalid_argument("observed_order: errors and spacings must be positive");
    }
    x.push_back(std::log(spacings[i]));
    y.push_back(std::log(errors[i]));
  }
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw std::invalid_argument("observed_order: spacings must differ");
  return (n * sxy - sx * sy) / denom;
}

double TruncationProfile::interior_norm() const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < te.size(); ++i) {
    if (interior[static_cast<std::size_t>(i)]) acc += te[i] * te[i];
  }
  return std::sqrt(spacing * acc);
}

double TruncationProfile::boundary_max() const { return boundary.cwiseAbs().maxCoeff(); }

TruncationProfile truncation_vector(const DiscreteOperator& op, const ManufacturedProblem& problem, double t) {
  const BlockGrid& grid = op.grid();
  const SchemeSpec& spec = op.spec();
  const BlockStencil stencil = block_stencil(spec.order, spec.c);
  const double s = grid.spacing();
  const auto m = static_cast<Eigen::Index>(grid.size());

  const Eigen::VectorXd u = project(problem, grid, t);
  Eigen::VectorXd image(m);
  op.apply(u, image);
  if (spec.bc != BoundaryKind::periodic) op.add_boundary_vector(t, problem.boundary_data(spec.bc), image);

  TruncationProfile profile;
  profile.spacing = s;
  profile.te.resize(m);
  profile.boundary.resize(m);
  profile.interior.assign(grid.size(), true);
  const double scale = 1.0 / (stencil.denominator * s * s);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = grid[static_cast<std::size_t>(i)];
    const double uxx = problem.partial(2, 0, x, t);
    profile.te[i] = uxx - image[i];
    // The interior stencil sees exact values everywhere, wrapping on
    // periodic grids and reaching past the ends on IBVP grids.
    double interior = 0.0;
    for (const Tap& tap : stencil.row(static_cast<std::size_t>(i))) {
      interior += tap.weight * problem.u(x + tap.offset * s, t);
    }
    profile.boundary[i] = profile.te[i] - (uxx - scale * interior);
  }
  if (spec.bc != BoundaryKind::periodic) {
    const auto reach = static_cast<Eigen::Index>(stencil.reach());
    for (Eigen::Index i = 0; i < std::min(reach, m); ++i) {
      profile.interior[static_cast<std::size_t>(i)] = false;
      profile.interior[static_cast<std::size_t>(m - 1 - i)] = false;
    }
  }
  return profile;
}

std::string StudyConfig::problem_name() const {
  if (!problem.empty()) return problem;
  return bc == BoundaryKind::periodic ? "exp-cos-periodic" : "exp-cos-ibvp";
}

StepPolicy StudyConfig::policy() const {
  StepPolicy p = StepPolicy::for_order(order);
  if (kappa) p.kappa = *kappa;
  return p;
}

const ReportGroup* ConvergenceReport::group(double c, double tol) const {
  for (const ReportGroup& g : groups) {
    if (std::abs(g.c - c) <= tol) return &g;
  }
  return nullptr;
}

ReportRow run_case(const SchemeSpec& spec, int n, const ManufacturedProblem& problem, double t_end,
                   const StepPolicy& policy) {
  const BlockGrid grid = grid_for(spec.bc, n, problem.length());
  const DiscreteOperator op = build_operator(grid, spec);
  const Eigen::VectorXd v = integrate(op, problem, t_end, policy);
  const Eigen::VectorXd exact = project(problem, grid, t_end);
  return ReportRow{spec.order, spec.bc, spec.c, n, grid.spacing(), error_norm(v, exact, grid.spacing()), {}, {}};
}

ConvergenceReport run_study(const StudyConfig& config) {
  if (config.c_values.empty() || config.n_values.empty()) throw std::invalid_argument("study needs c and N values");
  const auto problem = make_problem(config.problem_name(), config.length);
  const StepPolicy policy = config.policy();

  std::vector<int> ns = config.n_values;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  // Validate every grid before spending time integrating.
  for (int n : ns) grid_for(config.bc, n, problem->length());

  struct Job {
    double c;
    int n;
  };
  std::vector<Job> jobs;
  for (double c : config.c_values) {
    for (int n : ns) jobs.push_back({c, n});
  }
  std::vector<std::optional<ReportRow>> results(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());

  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(jobs.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const SchemeSpec spec{config.order, config.bc, jobs[i].c, config.closure};
        results[i] = run_case(spec, jobs[i].n, *problem, config.t_end, policy);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  std::vector<std::future<void>> pool;
  for (unsigned w = 1; w < workers; ++w) pool.push_back(std::async(std::launch::async, work));
  work();
  for (auto& f : pool) f.get();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  ConvergenceReport report;
  report.problem = problem->name();
  report.t_end = config.t_end;
  report.kappa = policy.kappa;
  std::size_t k = 0;
  for (double c : config.c_values) {
    ReportGroup group{c, {}, std::nullopt};
    std::vector<double> errors, spacings;
    for (std::size_t j = 0; j < ns.size(); ++j, ++k) {
      ReportRow row = *results[k];
      errors.push_back(row.error);
      spacings.push_back(row.s);
      if (j > 0 && std::all_of(errors.begin(), errors.end(), [](double e) { return e > 0.0; })) {
        row.pairwise_order = std::log(errors[j - 1] / row.error) / std::log(spacings[j - 1] / row.s);
        row.observed_order = observed_order(errors, spacings);
      }
      group.rows.push_back(report.rows.size());
      report.rows.push_back(row);
    }
    if (ns.size() > 1) group.fitted_order = report.rows.back().observed_order;
    report.groups.push_back(group);
  }
  return report;
}

void write_csv(const ConvergenceReport& report, std::ostream& out) {
  out << kReportCsvHeader << '\n';
  for (const ReportRow& r : report.rows) {
    out << to_string(r.order) << ',' << to_string(r.bc) << ',' << format_number("%.10g", r.c) << ',' << r.n << ','
        << format_number("%.17g", r.s) << ',' << format_number("%.17g", r.error) << ','
        << (r.observed_order ? format_number("%.6f", *r.observed_order) : "") << '\n';
  }
}

nlohmann::json to_json(const ConvergenceReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ReportRow& r : report.rows) {
    rows.push_back({{"scheme", to_string(r.order)},
                    {"bc", to_string(r.bc)},
                    {"c", r.c},
                    {"N", r.n},
                    {"s", r.s},
                    {"error", r.error},
                    {"observed_order", r.observed_order ? nlohmann::json(*r.observed_order) : nlohmann::json()},
                    {"pairwise_order", r.pairwise_order ? nlohmann::json(*r.pairwise_order) : nlohmann::json()}});
  }
  nlohmann::json groups = nlohmann::json::array();
  for (const ReportGroup& g : report.groups) {
    groups.push_back({{"c", g.c},
                      {"fitted_order", g.fitted_order ? nlohmann::json(*g.fitted_order) : nlohmann::json()}});
  }
  return {{"metadata", {{"problem", report.problem}, {"t_end", report.t_end}, {"kappa", report.kappa}}},
          {"rows", rows},
          {"groups", groups}};
}

void print_table(const ConvergenceReport& report, std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof line, "%-13s %-9s %10s %6s %12s %14s %9s %9s\n", "scheme", "bc", "c", "N", "s", "error",
                "pairwise", "fitted");
  out << line;
  for (const ReportRow& r : report.rows) {
    const std::string pair = r.pairwise_order ? format_number("%.3f", *r.pairwise_order) : "-";
    const std::string fit = r.observed_order ? format_number("%.3f", *r.observed_order) : "-";
    std::snprintf(line, sizeof line, "%-13s %-9s %10.6g %6d %12.5e %14.6e %9s %9s\n", to_string(r.order),
                  to_string(r.bc), r.c, r.n, r.s, r.error, pair.c_str(), fit.c_str());
    out << line;
  }
}

SymbolTable symbol_table(double c, int n) {
  const BlockGrid grid = ibvp_grid(n, std::numbers::pi);
  const BlockStencil stencil = block_stencil(StencilOrder::second_block, c);
  SymbolTable table;
  table.c = c;
  table.n = n;
  for (int omega : split_frequencies(n, SpectrumSplit::ibvp)) {
    const SymbolRecord rec = eigvec_coefficients(stencil, grid, omega, SpectrumSplit::ibvp);
    table.periodic.push_back(rec.q1.real());
    table.periodic.push_back(rec.q2.real());
  }
  std::sort(table.periodic.begin(), table.periodic.end());

  std::map<int, SymbolTableRow> rows;
  for (int w = 0; w <= n; ++w) rows[w] = SymbolTableRow{w, {}, {}};
  for (BoundaryKind bc : {BoundaryKind::dirichlet, BoundaryKind::neumann}) {
    for (const IbvpEigenpair& e : ibvp_eigenpairs(grid, SchemeSpec{StencilOrder::second_block, bc, c})) {
      auto& column = bc == BoundaryKind::dirichlet ? rows[e.omega].dirichlet : rows[e.omega].neumann;
      column.push_back(e.eigenvalue);
    }
  }
  for (auto& [w, row] : rows) {
    std::sort(row.dirichlet.begin(), row.dirichlet.end());
    std::sort(row.neumann.begin(), row.neumann.end());
    table.rows.push_back(row);
  }
  return table;
}

void print_symbol_table(const SymbolTable& table, std::ostream& out) {
  auto join = [](const std::vector<double>& values) {
    std::string text;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) text += ", ";
      text += format_number("%.6g", values[i]);
    }
    return text;
  };
  out << "N = " << table.n << ", c = " << format_number("%.10g", table.c) << "\n";
  out << "periodic symbols: " << join(table.periodic) << "\n\n";
  char line[200];
  std::snprintf(line, sizeof line, "%5s  %-28s %-28s\n", "omega", "Dirichlet", "Neumann");
  out << line;
  for (const SymbolTableRow& row : table.rows) {
    std::snprintf(line, sizeof line, "%5d  %-28s %-28s\n", row.omega, join(row.dirichlet).c_str(),
                  join(row.neumann).c_str());
    out << line;
  }
}

nlohmann::json to_json(const SymbolTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const SymbolTableRow& row : table.rows) {
    rows.push_back({{"omega", row.omega}, {"dirichlet", row.dirichlet}, {"neumann", row.neumann}});
  }
  return {{"N", table.n}, {"c", table.c}, {"periodic", table.periodic}, {"rows", rows}};
}

Eigen::VectorXd modal_error(const DiscreteOperator& op, const Eigen::VectorXd& error) {
  if (op.spec().bc != BoundaryKind::periodic) throw std::invalid_argument("modal_error needs a periodic operator");
  const ModalBasis basis =
      assemble_modal_basis(block_stencil(op.spec().order, op.spec().c), op.grid(), SpectrumSplit::periodic_half);
  const Eigen::VectorXcd coeffs = basis.psi.partialPivLu().solve(error.cast<cplx>());
  return coeffs.cwiseAbs();
}

}  // namespace eis
