#pragma once

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "shannop/bands.hpp"
#include "shannop/field_io.hpp"
#include "shannop/fields.hpp"
#include "shannop/precond.hpp"
#include "shannop/report.hpp"
#include "shannop/solver.hpp"
#include "shannop/spectral.hpp"

namespace shannop::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Check {
  int criterion;  ///< 0 for checks outside the numbered list
  std::string name;
  std::string suite;
  std::function<CheckResult()> run;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// Collects sub-results of one check.
struct Tally {
  bool ok = true;
  std::vector<std::string> notes;
  void expect(bool cond, const std::string& what) {
    if (!cond) ok = false;
    notes.push_back((cond ? "" : "FAILED ") + what);
  }
  std::string detail() const {
    std::string s;
    for (const auto& n : notes) s += (s.empty() ? "" : "; ") + n;
    return s;
  }
};

inline double rel_diff(const SpectralField& a, const SpectralField& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.modes.size(); ++i) {
    num += std::norm(a.modes[i] - b.modes[i]);
    den += std::norm(b.modes[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double rel_diff(const RealField& a, const RealField& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    num += (a.values[i] - b.values[i]) * (a.values[i] - b.values[i]);
    den += b.values[i] * b.values[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline SpectralField random_spectrum(const GridSpec& g, int components, std::uint64_t seed) {
  return forward_transform(random_field(g, components, seed));
}

}  // namespace detail

/// Perfect reconstruction for every partition scheme on 128^2 and 64^3.
inline CheckResult perfect_reconstruction() {
  constexpr double kTol = 1e-12;
  constexpr double kCaseSeconds = 5.0;
  detail::Tally t;
  const auto start = detail::Clock::now();
  for (const char* g : {"128x128", "64x64x64"}) {
    const GridSpec grid = parse_grid(g);
    const SpectralField v = detail::random_spectrum(grid, 1, 11);
    struct Case {
      Scheme scheme;
      int depth;
    };
    for (const Case c : {Case{Scheme::tensorial, 0}, Case{Scheme::mra, 0}, Case{Scheme::tensorial, 1},
                         Case{Scheme::tensorial, 2}, Case{Scheme::mra, 1}, Case{Scheme::mra, 2}}) {
      const auto t0 = detail::Clock::now();
      const auto p = build_partition(grid, c.scheme, c.depth);
      const double err = detail::rel_diff(synthesize(analyze(v, p)), v);
      const double secs = detail::since(t0);
      t.expect(err <= kTol && secs < kCaseSeconds, std::string(g) + " " + to_string(c.scheme) + " depth " +
                                                       std::to_string(c.depth) + " err " + detail::fmt("%.2e", err) +
                                                       " in " + detail::fmt("%.2fs", secs));
    }
  }
  return {"perfect-reconstruction", t.ok, t.detail(), detail::since(start)};
}

/// Band energies add up to the field energy on 100 random 64^2 fields.
inline CheckResult band_energy_additivity() {
  constexpr double kTol = 1e-12;
  const auto start = detail::Clock::now();
  const GridSpec grid = parse_grid("64x64");
  const PartitionPtr parts[] = {build_partition(grid, Scheme::tensorial), build_partition(grid, Scheme::mra),
                                build_partition(grid, Scheme::tensorial, 1)};
  double worst = 0.0;
  for (int seed = 1; seed <= 100; ++seed) {
    const SpectralField v = detail::random_spectrum(grid, 1, 1000 + seed);
    const double total = l2_norm(v) * l2_norm(v);
    for (const auto& p : parts) {
      const BandedField b = analyze(v, p);
      double sum = b.dc_energy();
      for (std::size_t i = 0; i < b.bands.size(); ++i) sum += b.energy(i);
      worst = std::max(worst, std::abs(sum - total) / total);
    }
  }
  return {"band-energy-additivity", worst <= kTol, "worst relative defect " + detail::fmt("%.2e", worst),
          detail::since(start)};
}

namespace detail {

struct IlapRun {
  double worst_ratio = 0.0;
  double worst_oracle = 0.0;
  int max_iterations = 0;
  bool all_converged = true;
  double theoretical = 0.0;
};

/// 20 random right-hand sides through the implicit Laplacian solver.
inline IlapRun ilap_batch(Scheme scheme, int depth, int count = 20) {
  constexpr double kAlpha = 1e6;
  const GridSpec grid = parse_grid("128x128");
  const auto p = build_partition(grid, scheme, depth);
  const auto pc = implicit_laplacian_precond(kAlpha, p);
  const SymbolExpr a = SymbolExpr::implicit_laplacian(kAlpha);
  IlapRun run;
  for (int seed = 1; seed <= count; ++seed) {
    const SpectralField v = random_spectrum(grid, 1, 2000 + seed);
    SolveConfig cfg;
    cfg.strict = false;
    const auto r = richardson_solve(a, pc, v, cfg);
    run.worst_ratio = std::max(run.worst_ratio, r.report.max_ratio());
    run.max_iterations = std::max(run.max_iterations, r.report.iterations);
    run.all_converged = run.all_converged && r.report.converged;
    run.theoretical = r.report.theoretical_rate;
    run.worst_oracle = std::max(run.worst_oracle, rel_diff(r.u, exact_solve(a, v)));
  }
  return run;
}

}  // namespace detail

/// Tensorial implicit Laplacian: ratios within 0.6 + 0.02, corner mode fitted
/// rate at least 0.5, agreement with the modewise solution.
inline CheckResult ilap_tensorial_rate() {
  constexpr double kRatioBound = 0.6 + 0.02;
  constexpr double kCornerFloor = 0.5;
  constexpr double kOracleTol = 10 * 1e-10;
  constexpr double kSeconds = 30.0;
  const auto start = detail::Clock::now();
  detail::Tally t;
  const auto run = detail::ilap_batch(Scheme::tensorial, 0);
  t.expect(run.all_converged, "all 20 solves converged (max " + std::to_string(run.max_iterations) + " iterations)");
  t.expect(run.worst_ratio <= kRatioBound, "max residual ratio " + detail::fmt("%.4f", run.worst_ratio));
  t.expect(run.worst_oracle <= kOracleTol, "max deviation from modewise solution " + detail::fmt("%.2e", run.worst_oracle));

  const GridSpec grid = parse_grid("128x128");
  const auto pc = implicit_laplacian_precond(1e6, build_partition(grid, Scheme::tensorial));
  const auto corner = richardson_solve(SymbolExpr::implicit_laplacian(1e6), pc, corner_mode_field(grid, 1));
  t.expect(corner.report.fitted_rate >= kCornerFloor,
           "corner-mode fitted rate " + detail::fmt("%.4f", corner.report.fitted_rate));
  const double secs = detail::since(start);
  t.expect(secs < kSeconds, "runtime " + detail::fmt("%.2fs", secs));
  return {"ilap-tensorial-rate", t.ok, t.detail(), secs};
}

/// MRA implicit Laplacian in 2D: ratios within 0.5 + 0.02.
inline CheckResult ilap_mra_rate() {
  constexpr double kRatioBound = 0.5 + 0.02;
  const auto start = detail::Clock::now();
  detail::Tally t;
  const auto run = detail::ilap_batch(Scheme::mra, 0);
  t.expect(run.all_converged, "all 20 solves converged");
  t.expect(run.worst_ratio <= kRatioBound, "max residual ratio " + detail::fmt("%.4f", run.worst_ratio) +
                                               " (band bound " + detail::fmt("%.4f", run.theoretical) + ")");
  return {"ilap-mra-rate", t.ok, t.detail(), detail::since(start)};
}

/// Depth-1 packets: ratios within 5/13 + 0.02.
inline CheckResult ilap_packet_rate() {
  constexpr double kRatioBound = 5.0 / 13.0 + 0.02;
  const auto start = detail::Clock::now();
  detail::Tally t;
  const auto run = detail::ilap_batch(Scheme::tensorial, 1);
  t.expect(run.all_converged, "all 20 solves converged");
  t.expect(run.worst_ratio <= kRatioBound, "max residual ratio " + detail::fmt("%.4f", run.worst_ratio));
  return {"ilap-packet-rate", t.ok, t.detail(), detail::since(start)};
}

/// Leray iteration: ratios within 9/16 + 0.02, and 25/144 + 0.02 with packets.
inline CheckResult leray_rate() {
  constexpr double kPlain = 9.0 / 16.0 + 0.02;
  constexpr double kPacket = 25.0 / 144.0 + 0.02;
  const auto start = detail::Clock::now();
  detail::Tally t;
  struct Case {
    const char* grid;
    int depth;
    int fields;
  };
  for (const Case c : {Case{"128x128", 0, 3}, Case{"128x128", 1, 3}, Case{"64x64x64", 0, 1}, Case{"64x64x64", 1, 1}}) {
    const GridSpec grid = parse_grid(c.grid);
    const auto pc = leray_precond(build_partition(grid, Scheme::tensorial, c.depth));
    double worst = 0.0;
    bool converged = true;
    for (int f = 0; f < c.fields; ++f) {
      const auto r = helmholtz_decompose(detail::random_spectrum(grid, grid.dim(), 3000 + f), pc);
      worst = std::max(worst, r.report.max_ratio());
      converged = converged && r.report.converged;
    }
    const double bound = c.depth == 0 ? kPlain : kPacket;
    t.expect(converged && worst <= bound, std::string(c.grid) + " depth " + std::to_string(c.depth) +
                                              " max ratio " + detail::fmt("%.4f", worst));
  }
  return {"leray-rate", t.ok, t.detail(), detail::since(start)};
}

/// Helmholtz split properties against the modewise projector.
inline CheckResult leray_correctness() {
  constexpr double kSumTol = 1e-9;
  constexpr double kDivTol = 1e-10;
  constexpr double kEnergyTol = 1e-10;
  constexpr double kParallelTol = 1e-10;
  constexpr double kOracleTol = 10 * 1e-10;
  const auto start = detail::Clock::now();
  detail::Tally t;
  double sum_err = 0.0;
  double div_err = 0.0;
  double energy_err = 0.0;
  double parallel_err = 0.0;
  double oracle_err = 0.0;
  bool converged = true;
  struct Case {
    const char* grid;
    int depth;
    int fields;
  };
  for (const Case c : {Case{"128x128", 0, 5}, Case{"128x128", 1, 2}, Case{"32x32x32", 0, 2}}) {
    const GridSpec grid = parse_grid(c.grid);
    const auto pc = leray_precond(build_partition(grid, Scheme::tensorial, c.depth));
    for (int f = 0; f < c.fields; ++f) {
      const SpectralField u = detail::random_spectrum(grid, grid.dim(), 4000 + f);
      const auto r = helmholtz_decompose(u, pc);
      converged = converged && r.report.converged;
      SpectralField sum = r.u_div;
      for (std::size_t i = 0; i < sum.modes.size(); ++i) sum.modes[i] += r.u_curl.modes[i];
      sum_err = std::max(sum_err, detail::rel_diff(sum, u));
      for (double dv : r.report.divergence_history) div_err = std::max(div_err, dv);
      const double e = l2_norm(u);
      const double ed = l2_norm(r.u_div);
      const double ec = l2_norm(r.u_curl);
      energy_err = std::max(energy_err, std::abs(e * e - ed * ed - ec * ec) / (e * e));
      // u_curl(k) x k = 0: compare against its projection on k.
      for (std::size_t flat = 0; flat < grid.total(); ++flat) {
        const Wavevector k = grid.wavevector(flat);
        const double k2 = k.odd_norm2();
        double off = 0.0;
        cplx dot = 0.0;
        for (int i = 0; i < grid.dim(); ++i) dot += k.odd(i) * r.u_curl.at(i, flat);
        for (int i = 0; i < grid.dim(); ++i) {
          const cplx along = k2 > 0.0 ? dot * k.odd(i) / k2 : cplx(0.0);
          off += std::norm(r.u_curl.at(i, flat) - along);
        }
        parallel_err = std::max(parallel_err, std::sqrt(off) / e);
      }
      const auto exact = exact_leray(u);
      oracle_err = std::max(oracle_err, detail::rel_diff(r.u_div, exact.u_div));
    }
  }
  t.expect(converged, "all decompositions converged");
  t.expect(sum_err <= kSumTol, "u_div + u_curl = u to " + detail::fmt("%.2e", sum_err));
  t.expect(div_err <= kDivTol, "divergence of partial sums " + detail::fmt("%.2e", div_err));
  t.expect(parallel_err <= kParallelTol, "u_curl off-axis part " + detail::fmt("%.2e", parallel_err));
  t.expect(energy_err <= kEnergyTol, "energy split defect " + detail::fmt("%.2e", energy_err));
  t.expect(oracle_err <= kOracleTol, "u_div vs modewise projector " + detail::fmt("%.2e", oracle_err));
  return {"leray-correctness", t.ok, t.detail(), detail::since(start)};
}

/// Eigenvalues of Id - Mw - Lw: one equals lambda(xi), the rest vanish.
inline CheckResult leray_eigenstructure() {
  constexpr double kTol = 1e-10;
  constexpr double kCornerTol = 1e-12;
  constexpr int kSamples = 1000;
  const auto start = detail::Clock::now();
  detail::Tally t;
  std::mt19937_64 rng(20070401);
  double worst_match = 0.0;
  double worst_rest = 0.0;
  double worst_corner = 0.0;
  int corners = 0;
  std::size_t bands = 0;
  for (const char* g : {"128x128", "32x32x32"}) {
    const GridSpec grid = parse_grid(g);
    const int d = grid.dim();
    for (int depth : {0, 1}) {
      const auto p = build_partition(grid, Scheme::tensorial, depth);
      for (const auto& band : p->bands) {
        ++bands;
        const auto ops = leray_band_operators(band, d);
        for (int s = 0; s < kSamples; ++s) {
          Wavevector k;
          k.dim = d;
          for (int i = 0; i < d; ++i) {
            std::uniform_real_distribution<double> u(band.box[i].lo, band.box[i].hi);
            k.k[i] = (rng() & 1 ? 1.0 : -1.0) * u(rng);
          }
          const double lambda = leray_eigenvalue(ops.omega, k);
          const auto ev = Eigen::ComplexEigenSolver<CMatrix>(leray_iteration_matrix(ops, k), false).eigenvalues();
          int best = 0;
          for (int i = 1; i < ev.size(); ++i)
            if (std::abs(ev(i) - lambda) < std::abs(ev(best) - lambda)) best = i;
          worst_match = std::max(worst_match, std::abs(ev(best) - lambda));
          for (int i = 0; i < ev.size(); ++i)
            if (i != best) worst_rest = std::max(worst_rest, std::abs(ev(i)));
        }
        // Corners xi = (w1, 2 w2) and (2 w1, w2) of isotropic 2D bands.
        if (d == 2 && depth == 0 && band.id.scale[0] == band.id.scale[1]) {
          for (int axis = 0; axis < 2; ++axis) {
            Wavevector k;
            k.dim = 2;
            k.k[0] = ops.omega[0] * (axis == 0 ? 2.0 : 1.0);
            k.k[1] = ops.omega[1] * (axis == 1 ? 2.0 : 1.0);
            const auto ev = Eigen::ComplexEigenSolver<CMatrix>(leray_iteration_matrix(ops, k), false).eigenvalues();
            int best = std::abs(ev(0)) > std::abs(ev(1)) ? 0 : 1;
            worst_corner = std::max(worst_corner, std::abs(ev(best) - cplx(-9.0 / 16.0)));
            ++corners;
          }
        }
      }
    }
  }
  t.expect(worst_match <= kTol, std::to_string(bands) + " bands x " + std::to_string(kSamples) +
                                    " samples, lambda match " + detail::fmt("%.2e", worst_match));
  t.expect(worst_rest <= kTol, "remaining eigenvalues " + detail::fmt("%.2e", worst_rest));
  t.expect(worst_corner <= kCornerTol,
           std::to_string(corners) + " corners at -9/16 to " + detail::fmt("%.2e", worst_corner));
  return {"leray-eigenstructure", t.ok, t.detail(), detail::since(start)};
}

/// Coefficient derivative equals modewise i k_axis on random and smooth fields.
inline CheckResult lemarie_derivative() {
  constexpr double kTol = 1e-12;
  const auto start = detail::Clock::now();
  const GridSpec grid = parse_grid("64x64");
  const auto p = build_partition(grid, Scheme::tensorial);
  RealField smooth(grid, 1);
  for (std::size_t flat = 0; flat < grid.total(); ++flat) {
    const double x = grid.coordinate(flat, 0);
    const double y = grid.coordinate(flat, 1);
    smooth.at(0, flat) = std::exp(std::sin(x) + 0.5 * std::cos(2.0 * y)) + std::sin(3.0 * x + y);
  }
  double worst = 0.0;
  for (const RealField& f : {random_field(grid, 1, 5000), random_field(grid, 1, 5001), smooth}) {
    const SpectralField s = forward_transform(f);
    for (int axis = 0; axis < grid.dim(); ++axis) {
      const SpectralField lhs = synthesize(apply_lemarie_derivative(analyze(s, p), axis));
      const SpectralField rhs = apply_modewise(s, SymbolExpr::xi(axis));
      worst = std::max(worst, detail::rel_diff(lhs, rhs));
    }
  }
  return {"lemarie-derivative", worst <= kTol, "worst relative error " + detail::fmt("%.2e", worst),
          detail::since(start)};
}

/// Closed-form rates, and optimality of the scalar rule against 1% nudges.
inline CheckResult rate_formulas() {
  constexpr double kExact = 1e-15;
  constexpr double kLimit = 1e-9;
  constexpr double kNudge = 0.01;
  constexpr int kPairs = 50;
  const auto start = detail::Clock::now();
  detail::Tally t;
  const double k1 = rate_kantorovich(1.0, 2.0);
  const double k2 = rate_kantorovich(1.0, 1.5);
  const double il = rate_implicit_laplacian(1e12, 3.0, 6.0);
  t.expect(std::abs(k1 - 9.0 / 16.0) <= kExact, "kantorovich(1,2) " + detail::fmt("%.17g", k1));
  t.expect(std::abs(k2 - 25.0 / 144.0) <= kExact, "kantorovich(1,1.5) " + detail::fmt("%.17g", k2));
  t.expect(std::abs(il - 0.6) <= kLimit, "implicit-laplacian(1e12,a,2a) " + detail::fmt("%.12f", il));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(0.1, 10.0);
  int beaten = 0;
  for (int pair = 0; pair < kPairs; ++pair) {
    const GridSpec grid = parse_grid(pair % 2 ? "64x64" : "256");
    const auto p = build_partition(grid, pair % 4 == 1 ? Scheme::mra : Scheme::tensorial, pair % 3 == 0 ? 1 : 0);
    const std::size_t band = rng() % p->bands.size();
    // c0 + c1 |xi|^2 + c2 |xi|^4
    const double c0 = coef(rng);
    const double c1 = coef(rng);
    const double c2 = pair % 5 == 0 ? coef(rng) * 1e-3 : 0.0;
    const SymbolExpr nl = SymbolExpr::neg_laplacian();
    const SymbolExpr s = c0 * SymbolExpr::identity(1) + c1 * nl + c2 * (nl * nl);
    const auto pc = scalar_optimal(s, p);
    const double omega = std::get<RMatrix>(pc.entries[band])(0, 0);
    const auto ks = band_wavevectors(p->bands[band], p->grid);
    auto rate_at = [&](double w) {
      return contraction_over(s, [&](const Wavevector&) { return CMatrix::Constant(1, 1, w); }, ks);
    };
    const double best = rate_at(omega);
    if (rate_at(omega * (1 + kNudge)) < best || rate_at(omega * (1 - kNudge)) < best) ++beaten;
  }
  t.expect(beaten == 0, std::to_string(kPairs - beaten) + "/" + std::to_string(kPairs) +
                            " symbol/band pairs unbeaten by 1% nudges");
  return {"rate-formulas", t.ok, t.detail(), detail::since(start)};
}

/// e^{i xi} on [pi, 2pi] and the 2D rotation symbol admit no contracting
/// real constant over a 10^4-point search.
inline CheckResult counterexamples() {
  constexpr int kSearch = 10000;
  constexpr int kSamples = 257;
  const auto start = detail::Clock::now();
  detail::Tally t;
  const double pi = std::acos(-1.0);
  std::vector<Wavevector> xs;
  for (int s = 0; s < kSamples; ++s) {
    Wavevector k;
    k.dim = 1;
    k.k[0] = pi + pi * s / (kSamples - 1);
    xs.push_back(k);
  }

  auto phase = [](const Wavevector& k) { return CMatrix::Constant(1, 1, std::polar(1.0, k.k[0])); };
  double best_scalar = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSearch; ++i) {
    // |mu| log-spaced over [1e-3, 1e3], both signs.
    const double mag = std::pow(10.0, -3.0 + 6.0 * (i / 2) / (kSearch / 2 - 1));
    const double mu = i % 2 ? -mag : mag;
    best_scalar = std::min(best_scalar, contraction_over(phase, [&](const Wavevector&) {
                                           return CMatrix::Constant(1, 1, mu);
                                         }, xs));
  }
  t.expect(best_scalar >= 1.0, "e^{i xi}: best real constant reaches " + detail::fmt("%.4f", best_scalar));

  auto rotation = [](const Wavevector& k) {
    CMatrix m(2, 2);
    m << std::cos(k.k[0]), -std::sin(k.k[0]), std::sin(k.k[0]), std::cos(k.k[0]);
    return m;
  };
  std::vector<Wavevector> xs2;
  for (const auto& k : xs) {
    Wavevector w;
    w.dim = 2;
    w.k[0] = k.k[0];
    w.k[1] = 1.5 * pi;
    xs2.push_back(w);
  }
  // 10 values per entry over [-2, 2].
  double best_matrix = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSearch; ++i) {
    CMatrix mu(2, 2);
    int rest = i;
    for (int e = 0; e < 4; ++e) {
      mu(e / 2, e % 2) = -2.0 + 4.0 * (rest % 10) / 9.0;
      rest /= 10;
    }
    best_matrix = std::min(best_matrix, contraction_over(rotation, [&](const Wavevector&) { return mu; }, xs2));
  }
  t.expect(best_matrix >= 1.0, "rotation: best real matrix reaches " + detail::fmt("%.4f", best_matrix));
  return {"counterexamples", t.ok, t.detail(), detail::since(start)};
}

/// Richardson solutions agree with the modewise pseudo-inverse for several
/// operators and partitions.
inline CheckResult solver_oracle() {
  constexpr double kOracleTol = 10 * 1e-10;
  const auto start = detail::Clock::now();
  detail::Tally t;
  const GridSpec grid = parse_grid("64x64");
  struct Case {
    std::string name;
    SymbolExpr a;
    Scheme scheme;
    int depth;
  };
  const std::vector<Case> cases = {
      {"ilap(1) tensorial", SymbolExpr::implicit_laplacian(1.0), Scheme::tensorial, 0},
      {"ilap(1e6) mra", SymbolExpr::implicit_laplacian(1e6), Scheme::mra, 0},
      {"ilap(1e3) packets", SymbolExpr::implicit_laplacian(1e3), Scheme::tensorial, 2},
      {"nlap tensorial", SymbolExpr::neg_laplacian(), Scheme::tensorial, 0},
  };
  for (const auto& c : cases) {
    const auto p = build_partition(grid, c.scheme, c.depth);
    const auto pc = scalar_optimal(c.a, p);
    double worst = 0.0;
    bool converged = true;
    for (int seed = 0; seed < 20; ++seed) {
      SpectralField v = detail::random_spectrum(grid, 1, 6000 + seed);
      // keep v in the range of A (nlap annihilates the mean)
      for (std::size_t f = 0; f < grid.total(); ++f)
        if (std::abs((*eval_symbol(c.a, grid.wavevector(f), SingularModePolicy::zero))(0, 0)) == 0.0) v.at(0, f) = 0.0;
      const auto r = richardson_solve(c.a, pc, v);
      converged = converged && r.report.converged;
      worst = std::max(worst, detail::rel_diff(r.u, exact_solve(c.a, v)));
    }
    t.expect(converged && worst <= kOracleTol,
             c.name + (converged ? "" : " (not converged)") + " deviation " + detail::fmt("%.2e", worst));
  }
  return {"solver-oracle", t.ok, t.detail(), detail::since(start)};
}

/// SWF1 round trip is bit-exact and a corrupted header is rejected.
inline CheckResult swf1_roundtrip() {
  const auto start = detail::Clock::now();
  detail::Tally t;
  const RealField f = random_field(parse_grid("16x8x4"), 3, 9);
  std::stringstream ss;
  write_swf1(ss, f);
  const std::string bytes = ss.str();
  std::stringstream in(bytes);
  const RealField g = read_swf1(in);
  t.expect(g.values == f.values && g.grid == f.grid && g.components == f.components, "bit-exact round trip");
  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream in_bad(bad);
  bool rejected = false;
  try {
    read_swf1(in_bad);
  } catch (const FormatError&) {
    rejected = true;
  }
  t.expect(rejected, "corrupted magic rejected");
  return {"swf1-roundtrip", t.ok, t.detail(), detail::since(start)};
}

inline const std::vector<Check>& all_checks() {
  static const std::vector<Check> checks = {
      {1, "perfect-reconstruction", "reconstruction", perfect_reconstruction},
      {2, "band-energy-additivity", "reconstruction", band_energy_additivity},
      {3, "ilap-tensorial-rate", "rates", ilap_tensorial_rate},
      {4, "ilap-mra-rate", "rates", ilap_mra_rate},
      {5, "ilap-packet-rate", "rates", ilap_packet_rate},
      {6, "leray-rate", "rates", leray_rate},
      {7, "leray-correctness", "oracle", leray_correctness},
      {8, "leray-eigenstructure", "rates", leray_eigenstructure},
      {9, "lemarie-derivative", "reconstruction", lemarie_derivative},
      {10, "rate-formulas", "rates", rate_formulas},
      {11, "counterexamples", "rates", counterexamples},
      {0, "solver-oracle", "oracle", solver_oracle},
      {0, "swf1-roundtrip", "reconstruction", swf1_roundtrip},
  };
  return checks;
}

inline bool is_suite(const std::string& s) {
  return s == "all" || s == "reconstruction" || s == "oracle" || s == "rates";
}

/// `PASS <name> (<seconds>) <detail>` or `FAIL ...`.
inline std::string format_result(const CheckResult& r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", r.seconds);
  return std::string(r.passed ? "PASS " : "FAIL ") + r.name + " (" + buf + ") " + r.detail;
}

}  // namespace shannop::verify
