#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "shannop/bands.hpp"
#include "shannop/precond.hpp"
#include "shannop/spectral.hpp"
#include "shannop/symbols.hpp"

namespace shannop {

struct SolveConfig {
  int max_iter = 200;
  double tol = 1e-10;        ///< relative residual
  double norm = 0.0;         ///< Sobolev order t of the residual norm
  bool record_history = true;
  bool strict = true;        ///< refuse to run when the theoretical rate is >= 1

  void validate() const {
    if (!(tol > 0.0)) throw StructuralError("tolerance must be positive");
    if (max_iter < 1) throw StructuralError("max_iter must be at least 1");
  }
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;    ///< relative residuals, entry 0 is 1
  std::vector<double> divergence_history;  ///< Leray only: |div u_div| / |u| after each iteration
  double fitted_rate = 0.0;
  double theoretical_rate = 0.0;
  bool converged = false;
  std::vector<double> per_band_rates;  ///< sampled sup of the iteration matrix norm per band

  std::vector<double> ratios() const {
    std::vector<double> r;
    for (std::size_t i = 1; i < residual_history.size(); ++i)
      r.push_back(residual_history[i - 1] > 0.0 ? residual_history[i] / residual_history[i - 1] : 0.0);
    return r;
  }
  double max_ratio() const {
    const auto r = ratios();
    return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
  }
};

/// The residual grew for 5 consecutive iterations.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, SolveReport report) : Error(what), report_(std::move(report)) {}
  const SolveReport& report() const noexcept { return report_; }

 private:
  SolveReport report_;
};

/// Strict mode refused a preconditioner whose bound is not a contraction.
class BoundViolationError : public Error {
 public:
  BoundViolationError(const std::string& band, double rho)
      : Error("band " + band + " has contraction bound " + std::to_string(rho) + " >= 1"), band_(band), rho_(rho) {}
  const std::string& band() const noexcept { return band_; }
  double rho() const noexcept { return rho_; }

 private:
  std::string band_;
  double rho_;
};

/// Geometric mean of the successive ratios over the last `window` steps
/// (default max(5, steps/2), clipped to the available steps).
inline double estimate_rate(const std::vector<double>& history, int window = 0) {
  if (history.size() < 3) throw InsufficientDataError("rate estimate needs at least 3 residuals");
  for (double h : history)
    if (!(h > 0.0) || !std::isfinite(h)) throw InsufficientDataError("rate estimate needs positive residuals");
  const int steps = static_cast<int>(history.size()) - 1;
  int w = window > 0 ? window : std::max(5, steps / 2);
  w = std::min(w, steps);
  return std::pow(history.back() / history[history.size() - 1 - w], 1.0 / w);
}

namespace detail {

inline std::vector<double> norm_weights(const GridSpec& grid, double t) {
  std::vector<double> w(grid.total(), 1.0);
  if (t != 0.0)
    for (std::size_t i = 0; i < grid.total(); ++i) w[i] = std::pow(1.0 + grid.wavevector(i).norm2(), t);
  return w;
}

inline double weighted_norm(const SpectralField& s, const std::vector<double>& w) {
  const std::size_t n = s.grid.total();
  double sum = 0.0;
  for (int c = 0; c < s.components; ++c)
    for (std::size_t i = 0; i < n; ++i) sum += w[i] * std::norm(s.at(c, i));
  return std::sqrt(sum);
}

inline double two_norm(const CMatrix& m) {
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
}

inline void finish_report(SolveReport& r) {
  const auto& h = r.residual_history;
  std::vector<double> positive;
  for (double v : h) {
    if (!(v > 0.0)) break;
    positive.push_back(v);
  }
  if (positive.size() >= 3) {
    r.fitted_rate = estimate_rate(positive);
  } else {
    r.fitted_rate = r.max_ratio();
  }
}

/// Tracks the 5-step growth rule; returns true when the iteration diverges.
struct GrowthWatch {
  int streak = 0;
  bool update(double previous, double current) {
    streak = current > previous ? streak + 1 : 0;
    return streak >= 5;
  }
};

}  // namespace detail

struct SpectralSolveResult {
  SpectralField u;
  SolveReport report;
};

struct SolveResult {
  RealField u;
  SolveReport report;
};

/// Preconditioned Richardson iteration in spectral space:
///   u_0 = 0, v_0 = v, u_{n+1} = u_n + M_w^+ v_n, v_{n+1} = v_n - A (u_{n+1} - u_n),
/// with M_w^+ the pseudo-inverse of each band's entry and the dc band solved
/// exactly by A(k)^+.
inline SpectralSolveResult richardson_solve(const SymbolExpr& a, const BandPreconditioner& pc,
                                            const SpectralField& v, const SolveConfig& cfg = {}) {
  cfg.validate();
  const Partition& p = *pc.partition;
  if (!(p.grid == v.grid)) throw StructuralError("preconditioner grid does not match right-hand side");
  if (a.rows() != v.components) throw StructuralError("operator output arity does not match right-hand side");
  if (pc.entries.size() != p.bands.size()) throw StructuralError("preconditioner has no entry for some band");
  const int n = a.rows();
  const int m = a.cols();
  const std::size_t total = p.grid.total();

  // Per-mode G = M_w^+ (m x n) and AG (n x n), row-major.
  std::vector<cplx> g(total * m * n);
  std::vector<cplx> ag(total * n * n);
  auto store = [&](std::size_t flat, const CMatrix& gm, const CMatrix& agm) {
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < n; ++c) g[(flat * m + r) * n + c] = gm(r, c);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) ag[(flat * n + r) * n + c] = agm(r, c);
  };

  SolveReport report;
  report.per_band_rates.assign(p.bands.size(), 0.0);
  for (std::size_t b = 0; b < p.bands.size(); ++b) {
    std::optional<CMatrix> constant;
    if (const auto* e = std::get_if<RMatrix>(&pc.entries[b])) constant = pseudo_inverse(*e);
    for (std::size_t flat : p.bands[b].modes) {
      const Wavevector k = p.grid.wavevector(flat);
      const CMatrix gm = constant ? *constant : pseudo_inverse(pc.entry_at(b, k));
      const auto am = eval_symbol(a, k, SingularModePolicy::zero);
      const CMatrix agm = (*am) * gm;
      store(flat, gm, agm);
      report.per_band_rates[b] =
          std::max(report.per_band_rates[b], detail::two_norm(CMatrix::Identity(n, n) - agm));
    }
  }
  for (std::size_t flat : p.dc_band.modes) {
    const Wavevector k = p.grid.wavevector(flat);
    const auto am = eval_symbol(a, k, pc.dc_policy);
    if (!am) {
      store(flat, CMatrix::Zero(m, n), CMatrix::Zero(n, n));
      continue;
    }
    const CMatrix gm = pseudo_inverse(*am);
    store(flat, gm, (*am) * gm);
  }

  report.theoretical_rate = 0.0;
  std::string worst_band;
  if (!pc.bounds.empty()) {
    for (const auto& bound : pc.bounds)
      if (bound.rho >= report.theoretical_rate) {
        report.theoretical_rate = bound.rho;
        worst_band = bound.band.str();
      }
  } else {
    for (std::size_t b = 0; b < p.bands.size(); ++b)
      if (report.per_band_rates[b] >= report.theoretical_rate) {
        report.theoretical_rate = report.per_band_rates[b];
        worst_band = p.bands[b].id.str();
      }
  }
  if (cfg.strict && report.theoretical_rate >= 1.0) throw BoundViolationError(worst_band, report.theoretical_rate);

  const auto weights = detail::norm_weights(p.grid, cfg.norm);
  SpectralField u(p.grid, m);
  SpectralField res = v;
  const double norm0 = detail::weighted_norm(v, weights);
  report.residual_history.push_back(1.0);
  if (norm0 == 0.0) {
    report.converged = true;
    return {u, report};
  }

  detail::GrowthWatch watch;
  std::vector<cplx> r(n);
  for (int it = 1; it <= cfg.max_iter; ++it) {
    for (std::size_t flat = 0; flat < total; ++flat) {
      for (int c = 0; c < n; ++c) r[c] = res.at(c, flat);
      const cplx* gk = &g[flat * m * n];
      const cplx* agk = &ag[flat * n * n];
      for (int row = 0; row < m; ++row) {
        cplx acc = 0.0;
        for (int c = 0; c < n; ++c) acc += gk[row * n + c] * r[c];
        u.at(row, flat) += acc;
      }
      for (int row = 0; row < n; ++row) {
        cplx acc = 0.0;
        for (int c = 0; c < n; ++c) acc += agk[row * n + c] * r[c];
        res.at(row, flat) -= acc;
      }
    }
    const double rel = detail::weighted_norm(res, weights) / norm0;
    const double prev = report.residual_history.back();
    report.residual_history.push_back(rel);
    report.iterations = it;
    if (rel <= cfg.tol) {
      report.converged = true;
      break;
    }
    if (watch.update(prev, rel)) {
      detail::finish_report(report);
      throw DivergenceError("residual grew for 5 consecutive iterations", report);
    }
  }
  detail::finish_report(report);
  if (!cfg.record_history) report.residual_history = {report.residual_history.back()};
  return {std::move(u), std::move(report)};
}

inline SolveResult richardson_solve(const SymbolExpr& a, const BandPreconditioner& pc, const RealField& v,
                                    const SolveConfig& cfg = {}) {
  auto r = richardson_solve(a, pc, forward_transform(v), cfg);
  return {inverse_transform(r.u), std::move(r.report)};
}

/// Modewise pseudo-inverse solution u(k) = A(k)^+ v(k).
inline SpectralField exact_solve(const SymbolExpr& a, const SpectralField& v,
                                 SingularModePolicy policy = SingularModePolicy::zero) {
  if (a.rows() != v.components) throw StructuralError("operator output arity does not match right-hand side");
  SpectralField u(v.grid, a.cols());
  Eigen::VectorXcd in(v.components);
  for (std::size_t flat = 0; flat < v.grid.total(); ++flat) {
    const auto am = eval_symbol(a, v.grid.wavevector(flat), policy);
    if (!am) continue;
    for (int c = 0; c < v.components; ++c) in(c) = v.at(c, flat);
    const Eigen::VectorXcd out = pseudo_inverse(*am) * in;
    for (int c = 0; c < a.cols(); ++c) u.at(c, flat) = out(c);
  }
  return u;
}

inline RealField exact_solve(const SymbolExpr& a, const RealField& v,
                             SingularModePolicy policy = SingularModePolicy::zero) {
  return inverse_transform(exact_solve(a, forward_transform(v), policy));
}

template <class Field>
struct HelmholtzParts {
  Field u_div;
  Field u_curl;
};

/// Modewise Leray split: u_div = (Id - xi xi^T/|xi|^2) u, u_curl = u - u_div.
/// Modes with xi = 0 (the mean, and pure Nyquist modes) belong to u_div.
inline HelmholtzParts<SpectralField> exact_leray(const SpectralField& u) {
  const int d = u.grid.dim();
  if (u.components != d) throw StructuralError("Leray projection needs a d-component field");
  HelmholtzParts<SpectralField> parts{apply_modewise(u, SymbolExpr::leray(d), SingularModePolicy::skip),
                                      SpectralField(u.grid, d)};
  for (std::size_t i = 0; i < u.modes.size(); ++i) parts.u_curl.modes[i] = u.modes[i] - parts.u_div.modes[i];
  return parts;
}

inline HelmholtzParts<RealField> exact_leray(const RealField& u) {
  auto parts = exact_leray(forward_transform(u));
  return {inverse_transform(parts.u_div), inverse_transform(parts.u_curl)};
}

/// ||sum_i i xi_i u_i||_2 of a d-component spectral field.
inline double spectral_divergence_norm(const SpectralField& u) {
  const int d = u.grid.dim();
  double sum = 0.0;
  for (std::size_t flat = 0; flat < u.grid.total(); ++flat) {
    const Wavevector k = u.grid.wavevector(flat);
    cplx div = 0.0;
    for (int i = 0; i < d; ++i) div += cplx(0.0, k.odd(i)) * u.at(i, flat);
    sum += std::norm(div);
  }
  return std::sqrt(sum);
}

struct HelmholtzResult {
  SpectralField u_div;
  SpectralField u_curl;
  SolveReport report;
};

/// Iterative Leray projector: v_0 = u, v_{n+1} = v_n - Mw v_n - Lw v_n, with
/// u_div = sum Mw v_n and u_curl = sum Lw v_n. Dc-band modes are split
/// exactly in the first sweep.
inline HelmholtzResult helmholtz_decompose(const SpectralField& u, const LerayPreconditioner& pc,
                                           const SolveConfig& cfg = {}) {
  cfg.validate();
  const Partition& p = *pc.partition;
  const int d = p.grid.dim();
  if (!(p.grid == u.grid)) throw StructuralError("partition grid does not match field");
  if (u.components != d) throw StructuralError("Helmholtz decomposition needs a d-component field");
  if (d < 2 || d > 3) throw UnsupportedSchemeError("Helmholtz decomposition supports d = 2 or 3");
  const std::size_t total = p.grid.total();
  const std::size_t dd = static_cast<std::size_t>(d) * d;

  // Per-mode Mw and Lw, row-major; dc modes hold the exact P and Id - P.
  std::vector<cplx> mw(total * dd);
  std::vector<cplx> lw(total * dd);
  auto store = [&](std::size_t flat, const CMatrix& a, const CMatrix& b) {
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        mw[flat * dd + r * d + c] = a(r, c);
        lw[flat * dd + r * d + c] = b(r, c);
      }
  };
  SolveReport report;
  report.per_band_rates.assign(p.bands.size(), 0.0);
  for (std::size_t b = 0; b < p.bands.size(); ++b) {
    for (std::size_t flat : p.bands[b].modes) {
      const Wavevector k = p.grid.wavevector(flat);
      CMatrix a;
      CMatrix l;
      pc.bands[b].evaluate(k, a, l);
      store(flat, a, l);
      report.per_band_rates[b] =
          std::max(report.per_band_rates[b], detail::two_norm(CMatrix::Identity(d, d) - a - l));
    }
  }
  const SymbolExpr leray = SymbolExpr::leray(d);
  for (std::size_t flat : p.dc_band.modes) {
    bool singular = false;
    const CMatrix proj = leray.evaluate(p.grid.wavevector(flat), singular);
    store(flat, proj, CMatrix::Identity(d, d) - proj);
  }

  report.theoretical_rate = 0.0;
  std::string worst_band;
  for (const auto& bound : pc.bounds)
    if (bound.rho >= report.theoretical_rate) {
      report.theoretical_rate = bound.rho;
      worst_band = bound.band.str();
    }
  if (cfg.strict && report.theoretical_rate >= 1.0) throw BoundViolationError(worst_band, report.theoretical_rate);

  const auto weights = detail::norm_weights(p.grid, cfg.norm);
  HelmholtzResult out{SpectralField(p.grid, d), SpectralField(p.grid, d), {}};
  SpectralField v = u;
  const double norm0 = detail::weighted_norm(u, weights);
  const double l2_0 = l2_norm(u);
  report.residual_history.push_back(1.0);
  if (norm0 == 0.0) {
    report.converged = true;
    out.report = std::move(report);
    return out;
  }

  detail::GrowthWatch watch;
  std::array<cplx, kMaxDim> x{};
  for (int it = 1; it <= cfg.max_iter; ++it) {
    for (std::size_t flat = 0; flat < total; ++flat) {
      for (int c = 0; c < d; ++c) x[c] = v.at(c, flat);
      const cplx* mk = &mw[flat * dd];
      const cplx* lk = &lw[flat * dd];
      for (int r = 0; r < d; ++r) {
        cplx a = 0.0;
        cplx l = 0.0;
        for (int c = 0; c < d; ++c) {
          a += mk[r * d + c] * x[c];
          l += lk[r * d + c] * x[c];
        }
        out.u_div.at(r, flat) += a;
        out.u_curl.at(r, flat) += l;
        v.at(r, flat) = x[r] - a - l;
      }
    }
    const double rel = detail::weighted_norm(v, weights) / norm0;
    const double prev = report.residual_history.back();
    report.residual_history.push_back(rel);
    report.divergence_history.push_back(spectral_divergence_norm(out.u_div) / l2_0);
    report.iterations = it;
    if (rel <= cfg.tol) {
      report.converged = true;
      break;
    }
    if (watch.update(prev, rel)) {
      detail::finish_report(report);
      throw DivergenceError("residual grew for 5 consecutive iterations", report);
    }
  }
  detail::finish_report(report);
  if (!cfg.record_history) report.residual_history = {report.residual_history.back()};
  out.report = std::move(report);
  return out;
}

struct RealHelmholtzResult {
  RealField u_div;
  RealField u_curl;
  SolveReport report;
};

inline RealHelmholtzResult helmholtz_decompose(const RealField& u, const PartitionPtr& p, const SolveConfig& cfg = {}) {
  auto r = helmholtz_decompose(forward_transform(u), leray_precond(p), cfg);
  return {inverse_transform(r.u_div), inverse_transform(r.u_curl), std::move(r.report)};
}

}  // namespace shannop
