#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "shannop/bands.hpp"
#include "shannop/symbols.hpp"

namespace shannop {

enum class RateFormula { implicit_laplacian, kantorovich, sampled_sup };

inline const char* to_string(RateFormula f) {
  switch (f) {
    case RateFormula::implicit_laplacian: return "implicit-laplacian";
    case RateFormula::kantorovich: return "kantorovich";
    case RateFormula::sampled_sup: return "sampled-sup";
  }
  return "?";
}

/// Contraction bound rho of one band, with the extrema it was computed from.
struct RateBound {
  BandId band;
  double a = 0.0;
  double b = 0.0;
  double rho = 0.0;
  RateFormula formula = RateFormula::sampled_sup;
};

/// |lambda| bound of Id - (1 + alpha|xi|^2)/(1 + alpha w^2) on a^2 <= |xi|^2 <= b^2
/// with the optimal w^2 = (a^2 + b^2)/2.
inline double rate_implicit_laplacian(double alpha, double a, double b) {
  const double a2 = a * a;
  const double b2 = b * b;
  return alpha * (b2 - a2) / (2.0 + alpha * (b2 + a2));
}

/// Kantorovich bound 1/4 (a/b + b/a)^2 - 1.
inline double rate_kantorovich(double a, double b) {
  const double d = (b - a) * (b + a);
  return d * d / (4.0 * a * a * b * b);
}

/// Per-band approximation operators M_w of a target symbol. A band entry is
/// either a real constant matrix or a symbol with the band constants baked in.
struct BandPreconditioner {
  using Entry = std::variant<RMatrix, SymbolExpr>;

  PartitionPtr partition;
  std::vector<Entry> entries;
  SymbolExpr target;
  SingularModePolicy dc_policy = SingularModePolicy::skip;
  std::vector<RateBound> bounds;  ///< closed-form bounds, when the builder knows one

  CMatrix entry_at(std::size_t band, const Wavevector& k) const {
    return std::visit(
        [&](const auto& e) -> CMatrix {
          if constexpr (std::is_same_v<std::decay_t<decltype(e)>, RMatrix>) {
            return e.template cast<cplx>();
          } else {
            return e(k);
          }
        },
        entries.at(band));
  }

  double theoretical_rate() const {
    double rho = 0.0;
    for (const auto& b : bounds) rho = std::max(rho, b.rho);
    return rho;
  }
};

/// Largest 2-norm of Id - M(k) E(k)^+ over a set of wavevectors.
template <SymbolLike S, class EntryFn>
double contraction_over(const S& sym, EntryFn&& entry, std::span<const Wavevector> modes) {
  double worst = 0.0;
  for (const auto& k : modes) {
    const CMatrix m = sym(k);
    const CMatrix prod = m * pseudo_inverse(CMatrix(entry(k)));
    const CMatrix r = CMatrix::Identity(prod.rows(), prod.cols()) - prod;
    worst = std::max(worst, r.rows() == 1 ? std::abs(r(0, 0)) : Eigen::JacobiSVD<CMatrix>(r).singularValues()(0));
  }
  return worst;
}

inline std::vector<Wavevector> band_wavevectors(const FrequencyBand& band, const GridSpec& grid) {
  std::vector<Wavevector> ks;
  ks.reserve(band.modes.size());
  for (std::size_t flat : band.modes) ks.push_back(grid.wavevector(flat));
  return ks;
}

/// Achieved sup over the band's grid modes of ||Id - M(k) entry(k)^+||_2.
template <SymbolLike S>
double sampled_contraction(const S& sym, const BandPreconditioner& pc, std::size_t band) {
  const auto& b = pc.partition->bands.at(band);
  const auto ks = band_wavevectors(b, pc.partition->grid);
  return contraction_over(sym, [&](const Wavevector& k) { return pc.entry_at(band, k); }, ks);
}

namespace detail {

inline std::vector<Wavevector> box_corners(const FrequencyBand& band) {
  const int d = static_cast<int>(band.box.size());
  std::vector<Wavevector> out;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Wavevector k;
    k.dim = d;
    for (int i = 0; i < d; ++i) k.k[i] = (mask >> i) & 1 ? band.box[i].hi : band.box[i].lo;
    out.push_back(k);
  }
  return out;
}

}  // namespace detail

/// How scalar_optimal picks the band constant from m = inf |p|, M = sup |p|.
///  minimax:  w = (m + M)/2, minimizing sup |1 - p/w| (the Richardson
///            contraction) at (M - m)/(M + m).
///  harmonic: 1/w = (1/m + 1/M)/2, minimizing sup |1 - w/p| instead; its
///            Richardson contraction is (M - m)/(2m).
enum class ScalarRule { minimax, harmonic };

/// Optimal constant per band for a real, sign-definite scalar symbol, with m
/// and M taken over the band's grid modes, or its box corners for monotone
/// radial symbols.
inline BandPreconditioner scalar_optimal(const SymbolExpr& sym, const PartitionPtr& p, bool mode_exact = true,
                                         ScalarRule rule = ScalarRule::minimax) {
  if (sym.rows() != 1 || sym.cols() != 1) throw StructuralError("scalar_optimal needs a 1x1 symbol");
  BandPreconditioner pc;
  pc.partition = p;
  pc.target = sym;
  for (const auto& band : p->bands) {
    const auto modes = band_wavevectors(band, p->grid);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    int sign = 0;
    auto visit = [&](const Wavevector& k, bool track) {
      const auto v = eval_symbol(sym, k, SingularModePolicy::error);
      const cplx z = (*v)(0, 0);
      if (std::abs(z.imag()) > 1e-12 * std::max(1.0, std::abs(z)))
        throw NotInvertibleOnBandError("symbol is not real on band " + band.id.str());
      const double x = z.real();
      const int s = (x > 0) - (x < 0);
      if (s == 0 || (sign != 0 && s != sign))
        throw NotInvertibleOnBandError("symbol vanishes or changes sign on band " + band.id.str());
      sign = s;
      if (track) {
        lo = std::min(lo, std::abs(x));
        hi = std::max(hi, std::abs(x));
      }
    };
    for (const auto& k : modes) visit(k, mode_exact);
    if (!mode_exact)
      for (const auto& k : detail::box_corners(band)) visit(k, true);
    const bool minimax = rule == ScalarRule::minimax;
    const double omega = sign * (minimax ? 0.5 * (lo + hi) : 2.0 / (1.0 / lo + 1.0 / hi));
    pc.entries.emplace_back(RMatrix::Constant(1, 1, omega));
    const auto ext = band_extrema(band, p->grid, mode_exact);
    const double rho = minimax ? (hi - lo) / (hi + lo) : (hi - lo) / (2.0 * lo);
    pc.bounds.push_back({band.id, ext.a, ext.b, rho, RateFormula::sampled_sup});
  }
  return pc;
}

/// (1 + alpha w_j^2) Id per band with w_j^2 = (a_j^2 + b_j^2)/2.
inline BandPreconditioner implicit_laplacian_precond(double alpha, const PartitionPtr& p, int components = 1,
                                                     bool mode_exact = true) {
  if (alpha < 0.0) throw StructuralError("implicit Laplacian needs alpha >= 0");
  BandPreconditioner pc;
  pc.partition = p;
  pc.target = SymbolExpr::implicit_laplacian(alpha, components);
  for (const auto& band : p->bands) {
    const auto ext = band_extrema(band, p->grid, mode_exact);
    const double omega2 = 0.5 * (ext.a * ext.a + ext.b * ext.b);
    pc.entries.emplace_back(RMatrix(RMatrix::Identity(components, components) * (1.0 + alpha * omega2)));
    pc.bounds.push_back(
        {band.id, ext.a, ext.b, rate_implicit_laplacian(alpha, ext.a, ext.b), RateFormula::implicit_laplacian});
  }
  return pc;
}

/// Band approximations of the Leray projector and of grad Delta^{-1} div,
/// built from the constructible generators with w_i baked in.
struct LerayBandOperators {
  std::vector<double> omega;
  SymbolExpr mw;
  SymbolExpr lw;

  /// Closed-form Mw(k) and Lw(k); agrees with evaluating the symbols.
  void evaluate(const Wavevector& k, CMatrix& m, CMatrix& l) const {
    const int d = static_cast<int>(omega.size());
    double w2 = 0.0;
    for (double w : omega) w2 += w * w;
    Eigen::VectorXd c(d);
    Eigen::VectorXd r(d);
    for (int i = 0; i < d; ++i) {
      c(i) = k.k[i];
      r(i) = omega[i] * omega[i] / k.k[i];
    }
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd lr = c * r.transpose() / w2;
    const Eigen::MatrixXd q = r * c.transpose() / w2;
    l = lr.cast<cplx>();
    m = ((id - q) * (id - lr)).cast<cplx>();
  }
};

/// With c = [xi_i], r = [w_i^2 / xi_i] and |w|^2 = sum w_i^2:
///   Lw = c r^T / |w|^2,  Mw = (Id - r c^T / |w|^2)(Id - Lw).
/// w_i is the lower edge of the band box on axis i (2^{j_i} for unrefined
/// tensorial bands), so xi_i / w_i stays within [1, hi_i/lo_i).
inline LerayBandOperators leray_band_operators(const FrequencyBand& band, int d) {
  if (band.box.size() != static_cast<std::size_t>(d) || band.id.scale.size() != static_cast<std::size_t>(d))
    throw UnsupportedSchemeError("Leray band operators need a tensorial band");
  LerayBandOperators ops;
  double w2 = 0.0;
  for (const auto& iv : band.box) {
    if (iv.lo <= 0.0) throw UnsupportedSchemeError("Leray band touches xi_i = 0");
    ops.omega.push_back(iv.lo);
    w2 += iv.lo * iv.lo;
  }
  // xi_i * w_j^2 / xi_j = w_j^2 (i xi_i)(i xi_j)^{-1}
  SymbolExpr lw;
  SymbolExpr q;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const SymbolExpr unit = SymbolExpr::delta(i, j, d);
      const SymbolExpr l = (ops.omega[j] * ops.omega[j] / w2) *
                           (unit * SymbolExpr::xi(i, d) * SymbolExpr::xi_inv(j, d));
      const SymbolExpr r = (ops.omega[i] * ops.omega[i] / w2) *
                           (unit * SymbolExpr::xi_inv(i, d) * SymbolExpr::xi(j, d));
      lw = lw.empty() ? l : lw + l;
      q = q.empty() ? r : q + r;
    }
  }
  const SymbolExpr id = SymbolExpr::identity(d);
  ops.lw = lw;
  ops.mw = (id - q) * (id - lw);
  return ops;
}

/// Leray approximations for every band of a tensorial partition.
struct LerayPreconditioner {
  PartitionPtr partition;
  std::vector<LerayBandOperators> bands;
  std::vector<RateBound> bounds;

  double theoretical_rate() const {
    double rho = 0.0;
    for (const auto& b : bounds) rho = std::max(rho, b.rho);
    return rho;
  }
};

/// Range [a, b] of zeta_i = |xi_i| / w_i over the band (a = min_i, b = max_i).
inline std::pair<double, double> zeta_range(const FrequencyBand& band, const GridSpec& grid,
                                            const std::vector<double>& omega, bool mode_exact) {
  const auto ext = band_extrema(band, grid, mode_exact);
  double a = std::numeric_limits<double>::infinity();
  double b = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    a = std::min(a, ext.per_axis[i].lo / omega[i]);
    b = std::max(b, ext.per_axis[i].hi / omega[i]);
  }
  return {a, b};
}

inline LerayPreconditioner leray_precond(const PartitionPtr& p, bool mode_exact = true) {
  if (p->scheme != Scheme::tensorial) throw UnsupportedSchemeError("Leray iteration needs a tensorial partition");
  const int d = p->grid.dim();
  if (d < 2) throw UnsupportedSchemeError("Leray iteration needs d >= 2");
  LerayPreconditioner pc;
  pc.partition = p;
  for (const auto& band : p->bands) {
    auto ops = leray_band_operators(band, d);
    const auto [a, b] = zeta_range(band, p->grid, ops.omega, mode_exact);
    pc.bounds.push_back({band.id, a, b, rate_kantorovich(a, b), RateFormula::kantorovich});
    pc.bands.push_back(std::move(ops));
  }
  return pc;
}

/// Id - Mw - Lw at one wavevector.
inline CMatrix leray_iteration_matrix(const LerayBandOperators& ops, const Wavevector& k) {
  CMatrix mw;
  CMatrix lw;
  ops.evaluate(k, mw, lw);
  return CMatrix::Identity(mw.rows(), mw.cols()) - mw - lw;
}

/// The single nonzero eigenvalue 1 - (sum xi_k^2)(sum w_k^4 / (|w|^4 xi_k^2)).
inline double leray_eigenvalue(const std::vector<double>& omega, const Wavevector& k) {
  double w2 = 0.0;
  for (double w : omega) w2 += w * w;
  double xi2 = 0.0;
  double inv = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    xi2 += k.k[i] * k.k[i];
    inv += std::pow(omega[i], 4) / (w2 * w2 * k.k[i] * k.k[i]);
  }
  return 1.0 - xi2 * inv;
}

enum class ContractionMeasure { norm, spectral_radius };

/// Sup over band modes of ||Id - Mw - Lw||_2 (a per-step bound) or of its
/// spectral radius (the asymptotic rate).
inline double sampled_contraction(const LerayPreconditioner& pc, std::size_t band,
                                  ContractionMeasure measure = ContractionMeasure::norm) {
  const auto& b = pc.partition->bands.at(band);
  double worst = 0.0;
  for (std::size_t flat : b.modes) {
    const CMatrix t = leray_iteration_matrix(pc.bands[band], pc.partition->grid.wavevector(flat));
    const double v = measure == ContractionMeasure::norm
                         ? Eigen::JacobiSVD<CMatrix>(t).singularValues()(0)
                         : Eigen::ComplexEigenSolver<CMatrix>(t, false).eigenvalues().cwiseAbs().maxCoeff();
    worst = std::max(worst, v);
  }
  return worst;
}

/// One row of the rate table export.
struct RateRow {
  std::string band_id;
  double a = 0.0;
  double b = 0.0;
  double rho_theoretical = 0.0;
  double rho_sampled = 0.0;
  std::string formula;
};

inline std::string rate_table_csv(const std::vector<RateRow>& rows) {
  std::string out = "band_id,a,b,rho_theoretical,rho_sampled,formula\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%s\n", r.band_id.c_str(), r.a, r.b,
                  r.rho_theoretical, r.rho_sampled, r.formula.c_str());
    out += buf;
  }
  return out;
}

}  // namespace shannop
