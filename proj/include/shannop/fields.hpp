#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "shannop/error.hpp"
#include "shannop/grid.hpp"
#include "shannop/spectral.hpp"
#include "shannop/symbols.hpp"

namespace shannop {

enum class FieldKind { random, gradient, solenoidal, corner_mode };

inline FieldKind parse_field_kind(std::string_view s) {
  if (s == "random") return FieldKind::random;
  if (s == "gradient") return FieldKind::gradient;
  if (s == "solenoidal") return FieldKind::solenoidal;
  if (s == "corner-mode") return FieldKind::corner_mode;
  throw StructuralError("unknown field kind '" + std::string(s) + "'");
}

/// "128", "128x128" or "64x64x64".
inline GridSpec parse_grid(std::string_view s) {
  std::vector<std::size_t> sizes;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t end = std::min(s.find('x', start), s.size());
    const std::string_view tok = s.substr(start, end - start);
    if (tok.empty() || tok.size() > 9 || tok.find_first_not_of("0123456789") != std::string_view::npos)
      throw StructuralError("malformed grid '" + std::string(s) + "'");
    sizes.push_back(std::stoul(std::string(tok)));
    start = end + 1;
  }
  return GridSpec(sizes);
}

/// Independent standard normal samples.
inline RealField random_field(const GridSpec& grid, int components, std::uint64_t seed) {
  RealField f(grid, components);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  for (double& v : f.values) v = dist(rng);
  return f;
}

/// grad p for a random scalar p.
inline RealField gradient_field(const GridSpec& grid, std::uint64_t seed) {
  const SpectralField p = forward_transform(random_field(grid, 1, seed));
  return inverse_transform(apply_modewise(p, SymbolExpr::gradient(grid.dim()), SingularModePolicy::zero));
}

/// Leray projection of a random d-component field.
inline RealField solenoidal_field(const GridSpec& grid, std::uint64_t seed) {
  const SpectralField u = forward_transform(random_field(grid, grid.dim(), seed));
  return inverse_transform(apply_modewise(u, SymbolExpr::leray(grid.dim()), SingularModePolicy::skip));
}

/// cos(sum_i (N_i/2 - 1) x_i) in every component, scaled to unit L2 norm.
/// It sits at the outer corner of the finest band.
inline RealField corner_mode_field(const GridSpec& grid, int components) {
  RealField f(grid, components);
  for (std::size_t flat = 0; flat < grid.total(); ++flat) {
    double phase = 0.0;
    for (int i = 0; i < grid.dim(); ++i)
      phase += (static_cast<double>(grid.size(i)) / 2.0 - 1.0) * grid.coordinate(flat, i);
    for (int c = 0; c < components; ++c) f.at(c, flat) = std::cos(phase);
  }
  const double n = l2_norm(f);
  for (double& v : f.values) v /= n;
  return f;
}

inline RealField generate_field(const GridSpec& grid, FieldKind kind, int components, std::uint64_t seed) {
  switch (kind) {
    case FieldKind::random:
      return random_field(grid, components, seed);
    case FieldKind::corner_mode:
      return corner_mode_field(grid, components);
    case FieldKind::gradient:
    case FieldKind::solenoidal:
      if (components != grid.dim())
        throw StructuralError("gradient and solenoidal fields need one component per axis");
      return kind == FieldKind::gradient ? gradient_field(grid, seed) : solenoidal_field(grid, seed);
  }
  throw StructuralError("unknown field kind");
}

}  // namespace shannop
