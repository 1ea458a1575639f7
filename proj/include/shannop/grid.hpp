#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "shannop/error.hpp"

namespace shannop {

using cplx = std::complex<double>;

inline constexpr int kMaxDim = 3;

/// Integer (or continuous) frequency vector xi. On the [0, 2pi)^d torus grid
/// wavevectors are integers and coincide with the continuous frequency.
///
/// `nyquist[i]` marks a component sitting on the self-conjugate Nyquist
/// frequency -N_i/2. Symbols that are odd in xi_i see 0 on that axis (see
/// `odd`), which keeps every real-symmetric symbol reality preserving.
struct Wavevector {
  int dim = 0;
  std::array<double, kMaxDim> k{};
  std::array<bool, kMaxDim> nyquist{};

  Wavevector() = default;
  Wavevector(std::initializer_list<double> values) : dim(static_cast<int>(values.size())) {
    if (values.size() > kMaxDim) throw StructuralError("wavevector dimension above 3");
    std::size_t i = 0;
    for (double v : values) k[i++] = v;
  }

  double norm2() const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += k[i] * k[i];
    return s;
  }
  /// Component as seen by odd symbols.
  double odd(int axis) const { return nyquist[axis] ? 0.0 : k[axis]; }
  double odd_norm2() const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += odd(i) * odd(i);
    return s;
  }
  Wavevector operator-() const {
    Wavevector r = *this;
    for (int i = 0; i < dim; ++i) r.k[i] = -k[i];
    return r;
  }
  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < dim; ++i) {
      if (i) s += ',';
      double v = k[i];
      s += (v == std::floor(v)) ? std::to_string(static_cast<long long>(v)) : std::to_string(v);
    }
    return s + ")";
  }
};

/// Periodic grid on [0, 2pi)^d with 2^{L_i} points per axis.
class GridSpec {
 public:
  GridSpec() = default;
  explicit GridSpec(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty() || sizes_.size() > kMaxDim)
      throw StructuralError("grid dimension must be 1, 2 or 3");
    for (std::size_t n : sizes_) {
      if (n < 4 || (n & (n - 1)) != 0)
        throw StructuralError("grid size " + std::to_string(n) + " is not a power of two >= 4");
    }
    total_ = std::accumulate(sizes_.begin(), sizes_.end(), std::size_t{1}, std::multiplies<>());
    stride_.fill(1);
    for (int i = dim() - 2; i >= 0; --i) stride_[i] = stride_[i + 1] * sizes_[i + 1];
  }

  int dim() const { return static_cast<int>(sizes_.size()); }
  std::size_t size(int axis) const { return sizes_[axis]; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t total() const { return total_; }
  int levels(int axis) const {
    int l = 0;
    while ((std::size_t{1} << l) < sizes_[axis]) ++l;
    return l;
  }
  bool isotropic() const {
    for (std::size_t n : sizes_)
      if (n != sizes_[0]) return false;
    return true;
  }

  /// Signed integer wavevector of a row-major storage index, k_i in [-N/2, N/2).
  std::array<int, kMaxDim> mode(std::size_t flat) const {
    std::array<int, kMaxDim> k{};
    for (int i = 0; i < dim(); ++i) {
      const auto n = static_cast<long long>(sizes_[i]);
      const auto idx = static_cast<long long>((flat / stride_[i]) % sizes_[i]);
      k[i] = static_cast<int>(idx < n / 2 ? idx : idx - n);
    }
    return k;
  }

  /// Storage index of a wavevector; components are taken modulo N_i.
  std::size_t index(const std::array<int, kMaxDim>& k) const {
    std::size_t flat = 0;
    for (int i = 0; i < dim(); ++i) {
      const auto n = static_cast<long long>(sizes_[i]);
      long long idx = k[i] % n;
      if (idx < 0) idx += n;
      flat += static_cast<std::size_t>(idx) * stride_[i];
    }
    return flat;
  }

  Wavevector wavevector(std::size_t flat) const {
    const auto k = mode(flat);
    Wavevector w;
    w.dim = dim();
    for (int i = 0; i < dim(); ++i) {
      w.k[i] = k[i];
      w.nyquist[i] = (k[i] == -static_cast<int>(sizes_[i] / 2));
    }
    return w;
  }

  /// Storage index of -k (Nyquist components map to themselves).
  std::size_t mirror(std::size_t flat) const {
    auto k = mode(flat);
    for (int i = 0; i < dim(); ++i) k[i] = -k[i];
    return index(k);
  }

  /// Physical coordinate of a sample along an axis.
  double coordinate(std::size_t flat, int axis) const {
    const auto idx = (flat / stride_[axis]) % sizes_[axis];
    return 2.0 * M_PI * static_cast<double>(idx) / static_cast<double>(sizes_[axis]);
  }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < sizes_.size(); ++i) s += (i ? "x" : "") + std::to_string(sizes_[i]);
    return s;
  }

  bool operator==(const GridSpec& o) const { return sizes_ == o.sizes_; }

 private:
  std::vector<std::size_t> sizes_;
  std::size_t total_ = 0;
  std::array<std::size_t, kMaxDim> stride_{};
};

/// Real samples of an m-component field, component-major then row-major.
struct RealField {
  GridSpec grid;
  int components = 1;
  std::vector<double> values;

  RealField() = default;
  RealField(GridSpec g, int m) : grid(std::move(g)), components(m), values(grid.total() * m, 0.0) {
    if (m < 1) throw StructuralError("field needs at least one component");
  }

  std::size_t points() const { return grid.total(); }
  double& at(int c, std::size_t flat) { return values[c * grid.total() + flat]; }
  double at(int c, std::size_t flat) const { return values[c * grid.total() + flat]; }

  void validate() const {
    if (values.size() != grid.total() * static_cast<std::size_t>(components))
      throw StructuralError("field value count does not match grid and components");
    for (double v : values)
      if (!std::isfinite(v)) throw StructuralError("field contains non-finite values");
  }
};

/// Unitary discrete Fourier coefficients of an m-component field, laid out
/// like RealField (component-major, storage order of GridSpec::mode).
struct SpectralField {
  GridSpec grid;
  int components = 1;
  std::vector<cplx> modes;

  SpectralField() = default;
  SpectralField(GridSpec g, int m) : grid(std::move(g)), components(m), modes(grid.total() * m) {
    if (m < 1) throw StructuralError("field needs at least one component");
  }

  cplx& at(int c, std::size_t flat) { return modes[c * grid.total() + flat]; }
  const cplx& at(int c, std::size_t flat) const { return modes[c * grid.total() + flat]; }
};

inline double l2_norm(const RealField& f) {
  double s = 0.0;
  for (double v : f.values) s += v * v;
  return std::sqrt(s);
}

inline double l2_norm(const SpectralField& f) {
  double s = 0.0;
  for (const cplx& z : f.modes) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace shannop
