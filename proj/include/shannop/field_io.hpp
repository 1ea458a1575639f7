#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "shannop/error.hpp"
#include "shannop/grid.hpp"

namespace shannop {

// SWF1 layout: "SWF1", u32 d, u32 m, d x u32 sizes, then m * prod(sizes)
// float64 samples, component-major then row-major. All little-endian.

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_f64(std::ostream& os, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw FormatError("SWF1: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace detail

inline void write_swf1(std::ostream& os, const RealField& f) {
  f.validate();
  os.write("SWF1", 4);
  detail::put_u32(os, static_cast<std::uint32_t>(f.grid.dim()));
  detail::put_u32(os, static_cast<std::uint32_t>(f.components));
  for (std::size_t n : f.grid.sizes()) detail::put_u32(os, static_cast<std::uint32_t>(n));
  for (double v : f.values) detail::put_f64(os, v);
  if (!os) throw FormatError("SWF1: write failed");
}

inline RealField read_swf1(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "SWF1", 4) != 0) throw FormatError("SWF1: bad magic");
  const std::uint32_t d = detail::get_u32(is);
  const std::uint32_t m = detail::get_u32(is);
  if (d < 1 || d > kMaxDim) throw FormatError("SWF1: dimension " + std::to_string(d) + " unsupported");
  if (m < 1 || m > 64) throw FormatError("SWF1: component count " + std::to_string(m) + " unsupported");
  std::vector<std::size_t> sizes(d);
  for (auto& n : sizes) n = detail::get_u32(is);
  GridSpec grid = [&] {
    try {
      return GridSpec(sizes);
    } catch (const StructuralError& e) {
      throw FormatError(std::string("SWF1: ") + e.what());
    }
  }();
  RealField f(grid, static_cast<int>(m));
  std::vector<unsigned char> raw(f.values.size() * 8);
  if (!is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw FormatError("SWF1: truncated sample data");
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(raw[8 * i + b]) << (8 * b);
    f.values[i] = std::bit_cast<double>(bits);
  }
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("SWF1: trailing bytes");
  return f;
}

inline void write_swf1(const std::string& path, const RealField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path + " for writing");
  write_swf1(os, f);
}

inline RealField read_swf1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path);
  return read_swf1(is);
}

}  // namespace shannop
