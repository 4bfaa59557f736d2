#include "cli.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "eis/block_grid.hpp"
#include "eis/convergence_lab.hpp"
#include "eis/manufactured_problems.hpp"
#include "eis/spatial_operators.hpp"
#include "eis/symbol_analysis.hpp"
#include "eis/time_integration.hpp"
#include "json.hpp"

namespace eis::cli {

namespace {

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  return text;
}

double parse_decimal(std::string_view text, std::string_view whole) {
  // std::from_chars for double is missing from older libstdc++; strtod is
  // locale-sensitive but the CLI never changes the C locale.
  const std::string buf(text);
  char* end = nullptr;
  const double value = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(value)) {
    throw UsageError("not a number: '" + std::string(whole) + "'");
  }
  return value;
}

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    parts.push_back(trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

struct Common {
  std::string scheme;
  std::string bc = "periodic";
  std::string c_text;
  std::string n_text;
  std::string problem;
  double t_end = 1.0;
  std::optional<double> kappa;
  std::string out_path;
  std::string format = "csv";
  std::string closure = "mass-consistent";
  unsigned threads = 0;
};

SchemeSpec scheme_spec(const Common& o, double c) {
  SchemeSpec spec;
  spec.order = parse_stencil_order(o.scheme);
  spec.bc = parse_boundary_kind(o.bc);
  spec.c = c;
  spec.closure = parse_neumann_closure(o.closure);
  return spec;
}

// Writes to --out when given, otherwise to `fallback`.
template <typename Writer>
void emit(const std::string& path, std::ostream& fallback, Writer&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(file);
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

std::string fmt(const char* spec, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, value);
  return buf;
}

nlohmann::json complex_json(const cplx& z) { return nlohmann::json::array({z.real(), z.imag()}); }

int cmd_converge(const Common& o, std::ostream& out) {
  StudyConfig config;
  config.order = parse_stencil_order(o.scheme);
  config.bc = parse_boundary_kind(o.bc);
  if (o.c_text.empty()) {
    config.c_values = config.order == StencilOrder::second_block
                          ? std::vector<double>{0.0, -0.25, 1.0 / 6.0, -1.0 / 6.0}
                          : std::vector<double>{4.0 / 13.0, 0.0, 1.0 / 6.0, -1.0 / 6.0};
  } else {
    config.c_values = parse_real_list(o.c_text);
  }
  if (!o.n_text.empty()) config.n_values = parse_int_list(o.n_text);
  config.problem = o.problem;
  config.t_end = o.t_end;
  config.kappa = o.kappa;
  config.threads = o.threads;
  config.closure = parse_neumann_closure(o.closure);
  if (!(config.t_end > 0.0)) throw UsageError("--t-end must be positive for converge");
  make_problem(config.problem_name(), config.length);  // reject unknown names before integrating

  const ConvergenceReport report = run_study(config);
  print_table(report, out);
  if (!o.out_path.empty()) {
    emit(o.out_path, out, [&](std::ostream& file) {
      if (o.format == "json") {
        file << to_json(report).dump(2) << '\n';
      } else {
        write_csv(report, file);
      }
    });
  }
  return kExitOk;
}

nlohmann::json analyze_json(int n, double c, StencilOrder order) {
  const SchemeSpec spec{order, BoundaryKind::periodic, c};
  const BlockGrid grid = periodic_grid(n, 2.0 * std::numbers::pi);
  const BlockStencil stencil = block_stencil(order, c);
  const ModalBasis basis = assemble_modal_basis(stencil, grid, SpectrumSplit::periodic_half);

  nlohmann::json records = nlohmann::json::array();
  bool real_nonpositive = true;
  for (const SymbolRecord& r : basis.records) {
    for (const cplx& q : {r.q1, r.q2}) {
      if (std::abs(q.imag()) > 1e-9 * std::max(1.0, std::abs(q)) || q.real() > 1e-9) real_nonpositive = false;
    }
    records.push_back({{"omega", r.omega},
                       {"nu", r.nu},
                       {"q1", complex_json(r.q1)},
                       {"q2", complex_json(r.q2)},
                       {"r1", complex_json(r.r1)},
                       {"r2", complex_json(r.r2)},
                       {"alpha1", complex_json(r.alpha1)},
                       {"beta1", complex_json(r.beta1)},
                       {"alpha2", complex_json(r.alpha2)},
                       {"beta2", complex_json(r.beta2)},
                       {"delta", r.delta},
                       {"determinant", std::abs(r.determinant())}});
  }

  nlohmann::json advisories = nlohmann::json::array();
  std::string verdict = "stable";
  if (spec.violates_von_neumann()) {
    verdict = "c >= 1/2: von Neumann condition violated";
  } else if (!real_nonpositive) {
    verdict = "symbols not real and non-positive";
  }
  if (spec.violates_determinant_bound()) advisories.push_back("c >= 3/8: determinant bound 0.9 not guaranteed");

  const double s = grid.spacing();
  const StepPolicy policy = StepPolicy::for_order(order);
  return {{"scheme", to_string(order)},
          {"N", n},
          {"c", c},
          {"s", s},
          {"verdict", verdict},
          {"advisories", advisories},
          {"det_min", basis.min_determinant},
          {"norm_psi", basis.norm_psi},
          {"norm_psi_bound", basis.psi_bound()},
          {"norm_psi_inverse", basis.norm_psi_inverse},
          {"norm_psi_inverse_bound", basis.psi_inverse_bound()},
          {"spectral_radius", spectral_radius(stencil, s)},
          {"rk4_stability_number", rk4_stability_number(spec, s, policy)},
          {"kappa", policy.kappa},
          {"records", records}};
}

int cmd_analyze(const Common& o, bool table, std::ostream& out) {
  const std::vector<double> cs = o.c_text.empty() ? std::vector<double>{-0.25} : parse_real_list(o.c_text);
  if (cs.size() != 1) throw UsageError("analyze takes a single --c value");
  const std::vector<int> ns = o.n_text.empty() ? std::vector<int>{table ? 6 : 16} : parse_int_list(o.n_text);
  if (ns.size() != 1) throw UsageError("analyze takes a single --n value");
  const double c = cs.front();
  const int n = ns.front();

  if (table) {
    const SymbolTable t = symbol_table(c, n);
    print_symbol_table(t, out);
    if (!o.out_path.empty()) {
      emit(o.out_path, out, [&](std::ostream& file) { file << to_json(t).dump(2) << '\n'; });
    }
    return kExitOk;
  }
  const StencilOrder order = o.scheme.empty() ? StencilOrder::second_block : parse_stencil_order(o.scheme);
  const nlohmann::json report = analyze_json(n, c, order);
  emit(o.out_path, out, [&](std::ostream& file) { file << report.dump(2) << '\n'; });
  if (!o.out_path.empty()) {
    out << "verdict: " << report["verdict"].get<std::string>() << "\n"
        << "det_min: " << fmt("%.10f", report["det_min"].get<double>()) << "\n";
  }
  return kExitOk;
}

int cmd_solve(const Common& o, std::ostream& out, std::ostream& err) {
  const std::vector<double> cs = o.c_text.empty() ? std::vector<double>{-0.25} : parse_real_list(o.c_text);
  const std::vector<int> ns = o.n_text.empty() ? std::vector<int>{64} : parse_int_list(o.n_text);
  if (cs.size() != 1 || ns.size() != 1) throw UsageError("solve takes a single --c and a single --n");
  if (o.t_end < 0.0) throw UsageError("--t-end must be non-negative");
  Common opts = o;
  if (opts.scheme.empty()) opts.scheme = "second-block";
  const SchemeSpec spec = scheme_spec(opts, cs.front());

  StudyConfig naming;
  naming.bc = spec.bc;
  naming.problem = o.problem;
  const auto problem = make_problem(naming.problem_name());
  const BlockGrid grid = spec.bc == BoundaryKind::periodic ? periodic_grid(ns.front(), problem->length())
                                                           : ibvp_grid(ns.front(), problem->length());
  const DiscreteOperator op = build_operator(grid, spec);
  StepPolicy policy = StepPolicy::for_order(spec.order);
  if (o.kappa) policy.kappa = *o.kappa;

  const Eigen::VectorXd v = integrate(op, *problem, o.t_end, policy);
  const Eigen::VectorXd exact = project(*problem, grid, o.t_end);
  emit(o.out_path, out, [&](std::ostream& file) {
    file << "x,numerical,exact,error\n";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      file << fmt("%.17g", grid[static_cast<std::size_t>(i)]) << ',' << fmt("%.17g", v[i]) << ','
           << fmt("%.17g", exact[i]) << ',' << fmt("%.17g", v[i] - exact[i]) << '\n';
    }
  });
  err << "error norm " << fmt("%.6e", error_norm(v, exact, grid.spacing())) << ", max pointwise "
      << fmt("%.6e", (v - exact).cwiseAbs().maxCoeff()) << "\n";
  return kExitOk;
}

// CLI11 reads "-1/4" or "-0.25" after an option as a new flag; glue such
// values onto the preceding long option.
std::vector<std::string> glue_negative_values(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const std::string& a : args) {
    const bool negative_value = a.size() > 1 && a[0] == '-' && (std::isdigit(static_cast<unsigned char>(a[1])) || a[1] == '.');
    if (negative_value && !out.empty() && out.back().rfind("--", 0) == 0 && out.back().find('=') == std::string::npos) {
      out.back() += "=" + a;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

}  // namespace

double parse_real(std::string_view text) {
  const std::string_view t = trim(text);
  const std::size_t slash = t.find('/');
  if (slash == std::string_view::npos) return parse_decimal(t, text);
  const double num = parse_decimal(trim(t.substr(0, slash)), text);
  const double den = parse_decimal(trim(t.substr(slash + 1)), text);
  if (den == 0.0) throw UsageError("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> values;
  for (std::string_view part : split_commas(text)) values.push_back(parse_real(part));
  return values;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> values;
  for (std::string_view part : split_commas(text)) {
    int v = 0;
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || end != part.data() + part.size()) {
      throw UsageError("not an integer: '" + std::string(part) + "'");
    }
    values.push_back(v);
  }
  return values;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Error-inhibiting two-point-block schemes for the 1-D heat equation"};
  app.name("eis");
  app.require_subcommand(1);
  app.set_version_flag("--version", "eis 1.0");

  Common o;
  auto add_scheme_flags = [&o](CLI::App* sub, bool scheme_required) {
    auto* scheme = sub->add_option("--scheme", o.scheme, "Stencil: second-block or fourth-block");
    scheme->check(CLI::IsMember({"second-block", "fourth-block"}));
    if (scheme_required) scheme->required();
    sub->add_option("--bc", o.bc, "Boundary condition: periodic, dirichlet or neumann")
        ->check(CLI::IsMember({"periodic", "dirichlet", "neumann"}))
        ->capture_default_str();
    sub->add_option("--neumann-closure", o.closure, "Neumann ghost closure: mass-consistent or taylor")
        ->check(CLI::IsMember({"mass-consistent", "taylor"}))
        ->capture_default_str();
    sub->add_option("--problem", o.problem,
                    "Manufactured solution: exp-cos-periodic, exp-cos-ibvp or poly:a0,a1,... "
                    "(default: exp-cos matching --bc, on [0, 1])");
    sub->add_option("--t-end", o.t_end, "Final time")->capture_default_str();
    sub->add_option("--kappa", o.kappa, "Step factor, dt = kappa s^2 (default 0.1 second-block, 0.05 fourth-block)");
  };

  auto* converge = app.add_subcommand("converge", "Convergence study over c and N; prints the order table");
  add_scheme_flags(converge, true);
  converge->add_option("--c", o.c_text,
                       "Comma-separated c values, fractions allowed "
                       "(default 0,-1/4,1/6,-1/6 second-block; 4/13,0,1/6,-1/6 fourth-block)");
  converge->add_option("--n", o.n_text, "Comma-separated block counts (default 32,64,128)");
  converge->add_option("--out", o.out_path, "Report file");
  converge->add_option("--format", o.format, "Report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  converge->add_option("--threads", o.threads, "Worker threads (default: hardware concurrency)");

  bool table = false;
  auto* analyze = app.add_subcommand("analyze", "Symbols, eigenvector coefficients, Psi norms and stability verdict");
  analyze->add_option("--scheme", o.scheme, "Stencil (default second-block)")
      ->check(CLI::IsMember({"second-block", "fourth-block"}));
  analyze->add_option("--c", o.c_text, "Free parameter (default -1/4)");
  analyze->add_option("--n", o.n_text, "Block count (default 16; 6 with --table)");
  analyze->add_option("--out", o.out_path, "JSON output file (default stdout)");
  analyze->add_flag("--table", table, "Print the Dirichlet/Neumann symbol table instead");

  auto* table_cmd = app.add_subcommand("table", "Dirichlet/Neumann symbol table (default N = 6, c = -1/4)");
  table_cmd->add_option("--c", o.c_text, "Free parameter (default -1/4)");
  table_cmd->add_option("--n", o.n_text, "Block count (default 6)");
  table_cmd->add_option("--out", o.out_path, "JSON output file");

  auto* solve = app.add_subcommand("solve", "Single integration; writes x, numerical, exact, error as CSV");
  add_scheme_flags(solve, false);
  solve->add_option("--c", o.c_text, "Free parameter (default -1/4)");
  solve->add_option("--n", o.n_text, "Block count (default 64)");
  solve->add_option("--out", o.out_path, "CSV output file (default stdout)");

  std::vector<std::string> args = glue_negative_values(raw_args);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (converge->parsed()) return cmd_converge(o, out);
    if (analyze->parsed()) return cmd_analyze(o, table, out);
    if (table_cmd->parsed()) return cmd_analyze(o, true, out);
    if (solve->parsed()) return cmd_solve(o, out, err);
  } catch (const NumericalInstability& e) {
    err << "numerical instability: " << e.what() << "\n";
    return kExitInstability;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace eis::cli
