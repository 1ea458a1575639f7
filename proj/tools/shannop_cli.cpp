#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "shannop/report.hpp"
#include "shannop/shannop.hpp"
#include "shannop/verify.hpp"

namespace {

using namespace shannop;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitBound = 4;

Scheme parse_scheme(const std::string& s) {
  if (s == "tensorial") return Scheme::tensorial;
  if (s == "mra") return Scheme::mra;
  throw StructuralError("unknown scheme '" + s + "'");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path + " for writing");
  os << text;
}

void write_report(const std::string& path, const SolveReport& r) {
  if (!path.empty()) write_text(path, report_json(r).dump(2) + "\n");
}

void print_summary(const SolveReport& r) {
  std::cout << "iterations " << r.iterations << " converged " << (r.converged ? "yes" : "no") << " fitted_rate "
            << r.fitted_rate << " theoretical_rate " << r.theoretical_rate << "\n";
}

struct GenFieldArgs {
  std::string grid;
  int components = 0;
  std::string kind = "random";
  std::uint64_t seed = 1;
  std::string out;
};

int run_gen_field(const GenFieldArgs& a) {
  const GridSpec grid = parse_grid(a.grid);
  const FieldKind kind = parse_field_kind(a.kind);
  int m = a.components;
  if (m == 0) m = (kind == FieldKind::gradient || kind == FieldKind::solenoidal) ? grid.dim() : 1;
  write_swf1(a.out, generate_field(grid, kind, m, a.seed));
  return kExitOk;
}

struct DecomposeArgs {
  std::string in;
  std::string grid;
  std::string scheme = "tensorial";
  int depth = 0;
};

int run_decompose(const DecomposeArgs& a) {
  if (a.in.empty() == a.grid.empty()) throw StructuralError("decompose needs exactly one of --in or --grid");
  if (a.in.empty()) {
    const auto p = build_partition(parse_grid(a.grid), parse_scheme(a.scheme), a.depth);
    std::cout << p->dump();
    if (p->dropped_bands) std::cout << "dropped " << p->dropped_bands << " empty bands\n";
    return kExitOk;
  }
  const RealField f = read_swf1(a.in);
  const auto p = build_partition(f.grid, parse_scheme(a.scheme), a.depth);
  const BandedField b = analyze(forward_transform(f), p);
  for (std::size_t i = 0; i < p->bands.size(); ++i)
    std::cout << "band " << p->bands[i].id.str() << " modes " << p->bands[i].modes.size() << " energy "
              << b.energy(i) << "\n";
  std::cout << "dc modes " << p->dc_band.modes.size() << " energy " << b.dc_energy() << "\n";
  if (p->dropped_bands) std::cout << "dropped " << p->dropped_bands << " empty bands\n";
  return kExitOk;
}

struct SolveArgs {
  double alpha = 1.0;
  std::string scheme = "tensorial";
  int depth = 0;
  std::string in;
  std::string out;
  std::string report;
};

int run_solve_ilap(const SolveArgs& a) {
  const RealField v = read_swf1(a.in);
  const auto p = build_partition(v.grid, parse_scheme(a.scheme), a.depth);
  const auto pc = implicit_laplacian_precond(a.alpha, p, v.components);
  const SymbolExpr op = SymbolExpr::implicit_laplacian(a.alpha, v.components);
  try {
    const auto r = richardson_solve(op, pc, v);
    write_swf1(a.out, r.u);
    write_report(a.report, r.report);
    print_summary(r.report);
    return kExitOk;
  } catch (const DivergenceError& e) {
    write_report(a.report, e.report());
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  }
}

struct HelmholtzArgs {
  std::string in;
  std::string out_div;
  std::string out_curl;
  int depth = 0;
  std::string report;
};

int run_helmholtz(const HelmholtzArgs& a) {
  const RealField u = read_swf1(a.in);
  const auto p = build_partition(u.grid, Scheme::tensorial, a.depth);
  try {
    const auto r = helmholtz_decompose(u, p);
    write_swf1(a.out_div, r.u_div);
    write_swf1(a.out_curl, r.u_curl);
    write_report(a.report, r.report);
    print_summary(r.report);
    return kExitOk;
  } catch (const DivergenceError& e) {
    write_report(a.report, e.report());
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  }
}

struct RatesArgs {
  std::string op;
  std::string grid = "128x128";
  std::string scheme = "tensorial";
  int depth = 0;
  double alpha = 1.0;
  std::string csv;
};

// rho_theoretical uses continuous box extrema, rho_sampled the grid modes.
std::vector<RateRow> rate_rows(const SymbolExpr& sym, const PartitionPtr& p) {
  std::vector<RateRow> rows;
  const int d = p->grid.dim();
  if (sym.kind() == SymbolExpr::Kind::leray) {
    const auto continuous = leray_precond(p, false);
    const auto exact = leray_precond(p, true);
    for (std::size_t b = 0; b < p->bands.size(); ++b) {
      const auto& bound = continuous.bounds[b];
      rows.push_back({bound.band.str(), bound.a, bound.b, bound.rho,
                      sampled_contraction(exact, b, ContractionMeasure::spectral_radius), to_string(bound.formula)});
    }
    return rows;
  }
  if (sym.kind() == SymbolExpr::Kind::implicit_laplacian) {
    const auto continuous = implicit_laplacian_precond(sym.parameter(), p, sym.rows(), false);
    const auto exact = implicit_laplacian_precond(sym.parameter(), p, sym.rows(), true);
    for (std::size_t b = 0; b < p->bands.size(); ++b) {
      const auto& bound = continuous.bounds[b];
      rows.push_back({bound.band.str(), bound.a, bound.b, bound.rho, sampled_contraction(sym, exact, b),
                      to_string(bound.formula)});
    }
    return rows;
  }
  if (sym.rows() != 1 || sym.cols() != 1 || sym.required_dim() > d)
    throw StructuralError("rates supports leray, ilap and real scalar symbols");
  const auto pc = scalar_optimal(sym, p);
  for (std::size_t b = 0; b < p->bands.size(); ++b) {
    const auto& bound = pc.bounds[b];
    rows.push_back({bound.band.str(), bound.a, bound.b, bound.rho, sampled_contraction(sym, pc, b),
                    to_string(bound.formula)});
  }
  return rows;
}

int run_rates(const RatesArgs& a) {
  const GridSpec grid = parse_grid(a.grid);
  ParseOptions opt;
  opt.dim = grid.dim();
  opt.alpha = a.alpha;
  const SymbolExpr sym = parse_symbol(a.op, opt);
  const auto p = build_partition(grid, parse_scheme(a.scheme), a.depth);
  const std::string csv = rate_table_csv(rate_rows(sym, p));
  if (a.csv.empty()) {
    std::cout << csv;
  } else {
    write_text(a.csv, csv);
  }
  return kExitOk;
}

int run_verify(const std::string& suite) {
  bool ok = true;
  for (const auto& check : verify::all_checks()) {
    if (suite != "all" && check.suite != suite) continue;
    const auto r = check.run();
    ok = ok && r.passed;
    std::cout << verify::format_result(r) << std::endl;
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shannon-wavelet preconditioners for constant-coefficient operators"};
  app.require_subcommand(1);

  GenFieldArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-field", "Write a test field as SWF1");
  gen_cmd->add_option("--grid", gen.grid, "Grid sizes, e.g. 128x128")->required();
  gen_cmd->add_option("--components", gen.components, "Component count (default 1, or d for vector kinds)")
      ->check(CLI::Range(1, 64));
  gen_cmd->add_option("--kind", gen.kind, "random | gradient | solenoidal | corner-mode")
      ->check(CLI::IsMember({"random", "gradient", "solenoidal", "corner-mode"}));
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Output file")->required();

  DecomposeArgs dec;
  auto* dec_cmd = app.add_subcommand("decompose", "Print a partition, or the band energies of a field");
  dec_cmd->add_option("--in", dec.in, "Input SWF1 field");
  dec_cmd->add_option("--grid", dec.grid, "Grid sizes when no field is given");
  dec_cmd->add_option("--scheme", dec.scheme, "tensorial | mra")->check(CLI::IsMember({"tensorial", "mra"}));
  dec_cmd->add_option("--packet-depth", dec.depth, "Packet refinement depth")->check(CLI::Range(0, 16));

  SolveArgs sol;
  auto* sol_cmd = app.add_subcommand("solve-ilap", "Solve (Id - alpha Laplacian) u = v");
  sol_cmd->add_option("--alpha", sol.alpha, "alpha >= 0")->check(CLI::NonNegativeNumber);
  sol_cmd->add_option("--scheme", sol.scheme, "tensorial | mra")->check(CLI::IsMember({"tensorial", "mra"}));
  sol_cmd->add_option("--packet-depth", sol.depth, "Packet refinement depth")->check(CLI::Range(0, 16));
  sol_cmd->add_option("--in", sol.in, "Right-hand side (SWF1)")->required();
  sol_cmd->add_option("--out", sol.out, "Solution (SWF1)")->required();
  sol_cmd->add_option("--report", sol.report, "JSON report");

  HelmholtzArgs hel;
  auto* hel_cmd = app.add_subcommand("helmholtz", "Split a vector field into divergence-free and gradient parts");
  hel_cmd->add_option("--in", hel.in, "d-component field (SWF1)")->required();
  hel_cmd->add_option("--out-div", hel.out_div, "Divergence-free part")->required();
  hel_cmd->add_option("--out-curl", hel.out_curl, "Gradient part")->required();
  hel_cmd->add_option("--packet-depth", hel.depth, "Packet refinement depth")->check(CLI::Range(0, 16));
  hel_cmd->add_option("--report", hel.report, "JSON report");

  RatesArgs rat;
  auto* rat_cmd = app.add_subcommand("rates", "Per-band contraction bounds as CSV");
  rat_cmd->add_option("--operator", rat.op, "Symbol expression, e.g. leray or ilap(1e6)")->required();
  rat_cmd->add_option("--grid", rat.grid, "Grid sizes");
  rat_cmd->add_option("--scheme", rat.scheme, "tensorial | mra")->check(CLI::IsMember({"tensorial", "mra"}));
  rat_cmd->add_option("--packet-depth", rat.depth, "Packet refinement depth")->check(CLI::Range(0, 16));
  rat_cmd->add_option("--alpha", rat.alpha, "alpha of a bare ilap")->check(CLI::NonNegativeNumber);
  rat_cmd->add_option("--csv", rat.csv, "Output file (default stdout)");

  std::string suite = "all";
  auto* ver_cmd = app.add_subcommand("verify", "Run the acceptance checks");
  ver_cmd->add_option("--suite", suite, "reconstruction | oracle | rates | all")
      ->check(CLI::IsMember({"reconstruction", "oracle", "rates", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen_field(gen);
    if (*dec_cmd) return run_decompose(dec);
    if (*sol_cmd) return run_solve_ilap(sol);
    if (*hel_cmd) return run_helmholtz(hel);
    if (*rat_cmd) return run_rates(rat);
    if (*ver_cmd) return run_verify(suite);
  } catch (const BoundViolationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBound;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
