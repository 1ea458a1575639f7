#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "shannop/grid.hpp"
#include "shannop/symbols.hpp"

namespace shannop {

namespace detail {

// FFTW's planner is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// In-place unitary DFT of one component (sign -1 forward, +1 inverse).
inline void unitary_dft(const GridSpec& grid, cplx* data, int sign) {
  std::vector<int> n(grid.sizes().begin(), grid.sizes().end());
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft(grid.dim(), n.data(), buf, buf, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(grid.total()));
  for (std::size_t i = 0; i < grid.total(); ++i) data[i] *= scale;
}

}  // namespace detail

/// Unitary forward DFT per component: X(k) = N^{-1/2} sum_x f(x) e^{-i k.x}.
inline SpectralField forward_transform(const RealField& f) {
  f.validate();
  SpectralField s(f.grid, f.components);
  const std::size_t n = f.grid.total();
  for (int c = 0; c < f.components; ++c) {
    cplx* out = s.modes.data() + c * n;
    for (std::size_t i = 0; i < n; ++i) out[i] = f.values[c * n + i];
    detail::unitary_dft(f.grid, out, FFTW_FORWARD);
  }
  return s;
}

/// Largest |modes(-k) - conj(modes(k))| over the field.
inline double hermitian_defect(const SpectralField& s) {
  const std::size_t n = s.grid.total();
  double worst = 0.0;
  for (int c = 0; c < s.components; ++c)
    for (std::size_t i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(s.at(c, s.grid.mirror(i)) - std::conj(s.at(c, i))));
  return worst;
}

/// Unitary inverse DFT. Throws RealityError when the result carries an
/// imaginary residue above 1e-10 relative to the largest sample.
inline RealField inverse_transform(const SpectralField& s) {
  if (s.modes.size() != s.grid.total() * static_cast<std::size_t>(s.components))
    throw StructuralError("spectral field size does not match grid and components");
  RealField f(s.grid, s.components);
  const std::size_t n = s.grid.total();
  std::vector<cplx> buf(n);
  for (int c = 0; c < s.components; ++c) {
    std::copy_n(s.modes.begin() + c * n, n, buf.begin());
    detail::unitary_dft(s.grid, buf.data(), FFTW_BACKWARD);
    double max_re = 0.0;
    double max_im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      max_re = std::max(max_re, std::abs(buf[i].real()));
      max_im = std::max(max_im, std::abs(buf[i].imag()));
      f.values[c * n + i] = buf[i].real();
    }
    if (max_im > 1e-10 * std::max(max_re, 1e-300) && max_im > 1e-300)
      throw RealityError("inverse transform of a non-Hermitian spectrum (imaginary residue " +
                         std::to_string(max_im) + ")");
  }
  return f;
}

/// (sum_k (1 + |k|^2)^t |modes(k)|^2)^{1/2}, summed over components.
inline double sobolev_norm(const SpectralField& s, double t) {
  if (t == 0.0) return l2_norm(s);
  const std::size_t n = s.grid.total();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::pow(1.0 + s.grid.wavevector(i).norm2(), t);
    for (int c = 0; c < s.components; ++c) sum += w * std::norm(s.at(c, i));
  }
  return std::sqrt(sum);
}

/// Modes where the symbol hits a singular factor.
inline std::size_t count_singular_modes(const SymbolExpr& m, const GridSpec& grid) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < grid.total(); ++i) {
    bool singular = false;
    m.evaluate(grid.wavevector(i), singular);
    count += singular ? 1 : 0;
  }
  return count;
}

/// out(k) = M(k) in(k) at every mode. Under `skip`, singular modes are copied
/// through unchanged for square symbols and zeroed otherwise.
inline SpectralField apply_modewise(const SpectralField& s, const SymbolExpr& m,
                                    SingularModePolicy policy = SingularModePolicy::skip) {
  if (m.cols() != s.components)
    throw StructuralError("symbol input arity " + std::to_string(m.cols()) + " does not match " +
                          std::to_string(s.components) + " field components");
  const std::size_t n = s.grid.total();
  SpectralField out(s.grid, m.rows());
  Eigen::VectorXcd in(s.components);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < s.components; ++c) in(c) = s.at(c, i);
    const auto value = eval_symbol(m, s.grid.wavevector(i), policy);
    if (!value) {
      if (m.square())
        for (int c = 0; c < m.rows(); ++c) out.at(c, i) = in(c);
      continue;
    }
    const Eigen::VectorXcd r = (*value) * in;
    for (int c = 0; c < m.rows(); ++c) out.at(c, i) = r(c);
  }
  return out;
}

/// Real-space convenience wrapper.
inline RealField apply_modewise(const RealField& f, const SymbolExpr& m,
                                SingularModePolicy policy = SingularModePolicy::skip) {
  return inverse_transform(apply_modewise(forward_transform(f), m, policy));
}

}  // namespace shannop
