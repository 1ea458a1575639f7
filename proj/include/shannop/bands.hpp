#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "shannop/error.hpp"
#include "shannop/grid.hpp"

namespace shannop {

enum class Scheme { tensorial, mra };

inline const char* to_string(Scheme s) { return s == Scheme::tensorial ? "tensorial" : "mra"; }

/// Half-open magnitude interval [lo, hi) in wavevector units.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double m) const { return m >= lo && m < hi; }
};

/// Scheme-specific band label. Tensorial bands carry one scale per axis, MRA
/// bands a single scale plus the type vector eps, and packet-refined bands add
/// a per-axis sub-interval index.
struct BandId {
  std::vector<int> scale;
  std::vector<int> type;
  std::vector<int> packet;

  auto operator<=>(const BandId&) const = default;
  bool operator==(const BandId&) const = default;

  std::string str() const {
    auto list = [](const std::vector<int>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ":" : "") + std::to_string(v[i]);
      return s;
    };
    std::string s = "j=" + list(scale);
    if (!type.empty()) s += "/e=" + list(type);
    if (!packet.empty()) s += "/p=" + list(packet);
    return s;
  }
};

struct FrequencyBand {
  BandId id;
  std::vector<Interval> box;
  std::vector<std::size_t> modes;  ///< storage indices, both signs included

  /// Dyadic scale j_i of this band along an axis.
  int scale(int axis) const { return id.scale.size() == 1 ? id.scale[0] : id.scale[axis]; }
};

/// Exact disjoint cover of a grid's modes by frequency bands plus dc_band.
struct Partition {
  GridSpec grid;
  Scheme scheme = Scheme::tensorial;
  int packet_depth = 0;
  std::vector<FrequencyBand> bands;
  FrequencyBand dc_band;
  std::size_t dropped_bands = 0;  ///< empty packet bands removed by refinement

  std::size_t mode_count() const {
    std::size_t n = dc_band.modes.size();
    for (const auto& b : bands) n += b.modes.size();
    return n;
  }

  /// `band <id> box <intervals> modes <count>` lines in id order, then dc.
  std::string dump() const {
    std::string out;
    char buf[64];
    for (const auto& b : bands) {
      out += "band " + b.id.str() + " box ";
      for (std::size_t i = 0; i < b.box.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s[%g,%g)", i ? "x" : "", b.box[i].lo, b.box[i].hi);
        out += buf;
      }
      out += " modes " + std::to_string(b.modes.size()) + "\n";
    }
    out += "dc modes " + std::to_string(dc_band.modes.size()) + "\n";
    return out;
  }
};

using PartitionPtr = std::shared_ptr<const Partition>;

namespace detail {

inline int floor_log2(int m) {
  int l = 0;
  while ((m >> (l + 1)) > 0) ++l;
  return l;
}

}  // namespace detail

/// Tensorial Shannon splitting: bands j in {0..L_i-2}^d with per-axis boxes
/// [2^j_i, 2^{j_i+1}). Modes with any k_i = 0 or k_i = -N_i/2 go to dc_band.
inline PartitionPtr build_tensorial_partition(const GridSpec& grid) {
  auto p = std::make_shared<Partition>();
  p->grid = grid;
  p->scheme = Scheme::tensorial;
  const int d = grid.dim();
  std::vector<int> radix(d);
  std::size_t count = 1;
  for (int i = 0; i < d; ++i) {
    radix[i] = grid.levels(i) - 1;
    count *= static_cast<std::size_t>(radix[i]);
  }
  p->bands.resize(count);
  for (std::size_t b = 0; b < count; ++b) {
    auto& band = p->bands[b];
    band.id.scale.resize(d);
    band.box.resize(d);
    std::size_t rest = b;
    for (int i = d - 1; i >= 0; --i) {
      const int j = static_cast<int>(rest % radix[i]);
      rest /= radix[i];
      band.id.scale[i] = j;
      band.box[i] = {std::ldexp(1.0, j), std::ldexp(1.0, j + 1)};
    }
  }
  for (std::size_t flat = 0; flat < grid.total(); ++flat) {
    const auto k = grid.mode(flat);
    std::size_t b = 0;
    bool dc = false;
    for (int i = 0; i < d; ++i) {
      const int m = std::abs(k[i]);
      if (m == 0 || m >= static_cast<int>(grid.size(i) / 2)) {
        dc = true;
        break;
      }
      b = b * radix[i] + detail::floor_log2(m);
    }
    (dc ? p->dc_band : p->bands[b]).modes.push_back(flat);
  }
  return p;
}

/// Isotropic MRA splitting into bands (j, eps), eps in {0,1}^d \ {0}, with
/// per-axis boxes [0, 2^j) for eps_i = 0 and [2^j, 2^{j+1}) for eps_i = 1.
inline PartitionPtr build_mra_partition(const GridSpec& grid) {
  if (!grid.isotropic()) throw UnsupportedSchemeError("MRA partition needs equal sizes on every axis");
  auto p = std::make_shared<Partition>();
  p->grid = grid;
  p->scheme = Scheme::mra;
  const int d = grid.dim();
  const int levels = grid.levels(0) - 1;
  const int types = (1 << d) - 1;
  for (int j = 0; j < levels; ++j) {
    for (int t = 1; t <= types; ++t) {
      FrequencyBand band;
      band.id.scale = {j};
      band.id.type.resize(d);
      band.box.resize(d);
      for (int i = 0; i < d; ++i) {
        const int eps = (t >> (d - 1 - i)) & 1;
        band.id.type[i] = eps;
        band.box[i] = eps ? Interval{std::ldexp(1.0, j), std::ldexp(1.0, j + 1)} : Interval{0.0, std::ldexp(1.0, j)};
      }
      p->bands.push_back(std::move(band));
    }
  }
  const int nyq = static_cast<int>(grid.size(0) / 2);
  for (std::size_t flat = 0; flat < grid.total(); ++flat) {
    const auto k = grid.mode(flat);
    int top = 0;
    bool dc = false;
    for (int i = 0; i < d; ++i) {
      top = std::max(top, std::abs(k[i]));
      if (std::abs(k[i]) == nyq) dc = true;
    }
    if (top == 0 || dc) {
      p->dc_band.modes.push_back(flat);
      continue;
    }
    const int j = detail::floor_log2(top);
    int t = 0;
    for (int i = 0; i < d; ++i) t = (t << 1) | (std::abs(k[i]) >= (1 << j) ? 1 : 0);
    p->bands[static_cast<std::size_t>(j * types + t - 1)].modes.push_back(flat);
  }
  return p;
}

/// Uniform Shannon packet refinement: every per-axis interval is cut into
/// 2^depth equal pieces. Pieces without grid modes are dropped and counted.
inline PartitionPtr refine_packet(const PartitionPtr& parent, int depth) {
  if (depth < 0) throw StructuralError("packet depth must be non-negative");
  if (depth == 0) return parent;
  auto p = std::make_shared<Partition>();
  p->grid = parent->grid;
  p->scheme = parent->scheme;
  p->packet_depth = parent->packet_depth + depth;
  p->dc_band = parent->dc_band;
  p->dropped_bands = parent->dropped_bands;
  const int d = p->grid.dim();
  const int pieces = 1 << depth;
  std::size_t subcount = 1;
  for (int i = 0; i < d; ++i) subcount *= pieces;

  for (const auto& band : parent->bands) {
    std::vector<FrequencyBand> subs(subcount);
    for (std::size_t s = 0; s < subcount; ++s) {
      auto& sub = subs[s];
      sub.id = band.id;
      sub.id.packet.resize(d, 0);
      sub.box.resize(d);
      std::size_t rest = s;
      for (int i = d - 1; i >= 0; --i) {
        const int piece = static_cast<int>(rest % pieces);
        rest /= pieces;
        const double w = (band.box[i].hi - band.box[i].lo) / pieces;
        sub.box[i] = {band.box[i].lo + piece * w, band.box[i].lo + (piece + 1) * w};
        sub.id.packet[i] = (band.id.packet.empty() ? 0 : band.id.packet[i] * pieces) + piece;
      }
    }
    for (std::size_t flat : band.modes) {
      const auto k = p->grid.mode(flat);
      std::size_t s = 0;
      for (int i = 0; i < d; ++i) {
        const double m = std::abs(k[i]);
        const double w = (band.box[i].hi - band.box[i].lo) / pieces;
        const int piece = std::min(pieces - 1, static_cast<int>(std::floor((m - band.box[i].lo) / w)));
        s = s * pieces + piece;
      }
      subs[s].modes.push_back(flat);
    }
    for (auto& sub : subs) {
      if (sub.modes.empty()) {
        ++p->dropped_bands;
      } else {
        p->bands.push_back(std::move(sub));
      }
    }
  }
  std::sort(p->bands.begin(), p->bands.end(),
            [](const FrequencyBand& a, const FrequencyBand& b) { return a.id < b.id; });
  return p;
}

/// Convenience: scheme plus optional packet depth.
inline PartitionPtr build_partition(const GridSpec& grid, Scheme scheme, int packet_depth = 0) {
  auto base = scheme == Scheme::tensorial ? build_tensorial_partition(grid) : build_mra_partition(grid);
  return refine_packet(base, packet_depth);
}

/// Per-axis derivation order nu of the wavelet family used at synthesis.
using FamilyTag = std::vector<int>;

/// Spectral restrictions of a field to every band of a partition.
/// Coefficients of band b are stored as bands[b][c * modes + i].
struct BandedField {
  PartitionPtr partition;
  int components = 1;
  FamilyTag family;
  std::vector<std::vector<cplx>> bands;
  std::vector<cplx> dc;

  double energy(std::size_t band) const {
    double s = 0.0;
    for (const cplx& z : bands[band]) s += std::norm(z);
    return s;
  }
  double dc_energy() const {
    double s = 0.0;
    for (const cplx& z : dc) s += std::norm(z);
    return s;
  }
};

inline BandedField analyze(const SpectralField& s, const PartitionPtr& p) {
  if (!(s.grid == p->grid)) throw StructuralError("field grid does not match partition grid");
  BandedField out;
  out.partition = p;
  out.components = s.components;
  out.family.assign(p->grid.dim(), 0);
  auto gather = [&](const FrequencyBand& band) {
    const std::size_t n = band.modes.size();
    std::vector<cplx> coeffs(n * s.components);
    for (int c = 0; c < s.components; ++c)
      for (std::size_t i = 0; i < n; ++i) coeffs[c * n + i] = s.at(c, band.modes[i]);
    return coeffs;
  };
  out.bands.reserve(p->bands.size());
  for (const auto& band : p->bands) out.bands.push_back(gather(band));
  out.dc = gather(p->dc_band);
  return out;
}

/// Spectral factor of a band-j coefficient at mode k_i in family nu_i:
/// g(nu, k, j) = (4 * 2^j / (i k))^nu, so that g(nu - 1) = g(nu) * i k / (4 * 2^j).
inline cplx family_factor(int nu, double k, int j) {
  if (nu == 0) return 1.0;
  const cplx base = std::ldexp(4.0, j) / cplx(0.0, k);
  return std::pow(base, nu);
}

/// Scatter band coefficients back to the grid, applying the family factor.
inline SpectralField synthesize(const BandedField& b) {
  const Partition& p = *b.partition;
  if (b.bands.size() != p.bands.size()) throw StructuralError("banded field does not match its partition");
  SpectralField s(p.grid, b.components);
  std::vector<char> seen(p.grid.total(), 0);
  const bool neutral = std::all_of(b.family.begin(), b.family.end(), [](int v) { return v == 0; });
  auto scatter = [&](const FrequencyBand& band, const std::vector<cplx>& coeffs, bool scaled) {
    const std::size_t n = band.modes.size();
    if (coeffs.size() != n * b.components) throw StructuralError("band coefficient count mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t flat = band.modes[i];
      if (seen[flat]++) throw StructuralError("overlapping bands in partition at mode index " + std::to_string(flat));
      cplx factor = 1.0;
      if (scaled) {
        const auto k = p.grid.mode(flat);
        for (int a = 0; a < p.grid.dim(); ++a) factor *= family_factor(b.family[a], k[a], band.scale(a));
      }
      for (int c = 0; c < b.components; ++c) s.at(c, flat) = coeffs[c * n + i] * factor;
    }
  };
  for (std::size_t i = 0; i < p.bands.size(); ++i) scatter(p.bands[i], b.bands[i], !neutral);
  scatter(p.dc_band, b.dc, false);
  return s;
}

struct BandExtrema {
  double a = 0.0;  ///< min |k|
  double b = 0.0;  ///< max |k|
  std::vector<Interval> per_axis;  ///< [min |k_i|, max |k_i|] as lo/hi
};

/// Extremal |k| over a band: over its actual modes (mode_exact) or over the
/// continuous box corners, a^2 = sum lo_i^2 and b^2 = sum hi_i^2.
inline BandExtrema band_extrema(const FrequencyBand& band, const GridSpec& grid, bool mode_exact) {
  if (band.modes.empty()) throw StructuralError("band_extrema of an empty band");
  BandExtrema e;
  const int d = grid.dim();
  if (!mode_exact) {
    double a2 = 0.0;
    double b2 = 0.0;
    for (const auto& iv : band.box) {
      a2 += iv.lo * iv.lo;
      b2 += iv.hi * iv.hi;
      e.per_axis.push_back(iv);
    }
    e.a = std::sqrt(a2);
    e.b = std::sqrt(b2);
    return e;
  }
  double a2 = std::numeric_limits<double>::infinity();
  double b2 = 0.0;
  e.per_axis.assign(d, Interval{std::numeric_limits<double>::infinity(), 0.0});
  for (std::size_t flat : band.modes) {
    const auto k = grid.mode(flat);
    double n2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double m = std::abs(k[i]);
      n2 += m * m;
      e.per_axis[i].lo = std::min(e.per_axis[i].lo, m);
      e.per_axis[i].hi = std::max(e.per_axis[i].hi, m);
    }
    a2 = std::min(a2, n2);
    b2 = std::max(b2, n2);
  }
  e.a = std::sqrt(a2);
  e.b = std::sqrt(b2);
  return e;
}

namespace detail {

inline void check_lemarie(const BandedField& b, int axis) {
  if (b.partition->scheme != Scheme::tensorial)
    throw UnsupportedSchemeError("wavelet derivation needs a tensorial partition");
  if (axis < 0 || axis >= b.partition->grid.dim()) throw StructuralError("axis out of range");
}

}  // namespace detail

/// d/dx_axis on wavelet coefficients: band j coefficients are scaled by
/// 4 * 2^{j_axis} and the family order on that axis drops by one. Modes of the
/// dc band are multiplied by i k_axis directly (0 on the Nyquist plane).
inline BandedField apply_lemarie_derivative(const BandedField& in, int axis) {
  detail::check_lemarie(in, axis);
  BandedField out = in;
  const Partition& p = *in.partition;
  for (std::size_t b = 0; b < p.bands.size(); ++b) {
    const double c = std::ldexp(4.0, p.bands[b].scale(axis));
    for (cplx& z : out.bands[b]) z *= c;
  }
  const std::size_t n = p.dc_band.modes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double k = p.grid.wavevector(p.dc_band.modes[i]).odd(axis);
    for (int c = 0; c < in.components; ++c) out.dc[c * n + i] *= cplx(0.0, k);
  }
  out.family[axis] -= 1;
  return out;
}

/// Inverse of apply_lemarie_derivative. Dc modes with k_axis = 0 (where the
/// derivative has no inverse) are set to zero.
inline BandedField apply_lemarie_integral(const BandedField& in, int axis) {
  detail::check_lemarie(in, axis);
  BandedField out = in;
  const Partition& p = *in.partition;
  for (std::size_t b = 0; b < p.bands.size(); ++b) {
    const double c = std::ldexp(4.0, p.bands[b].scale(axis));
    for (cplx& z : out.bands[b]) z /= c;
  }
  const std::size_t n = p.dc_band.modes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double k = p.grid.wavevector(p.dc_band.modes[i]).odd(axis);
    for (int c = 0; c < in.components; ++c) {
      cplx& z = out.dc[c * n + i];
      z = (k == 0.0) ? cplx(0.0) : z / cplx(0.0, k);
    }
  }
  out.family[axis] += 1;
  return out;
}

}  // namespace shannop
