#pragma once

// Field snapshot files:
//   bytes 0..3   magic "PTFS"
//   u32          format version (1)
//   u32          endianness tag 0x01020304 written in host order
//   u32          n
//   u32          kind (0 = real, 1 = complex)
//   f64 * n*n    row-major physical values (complex: re, im interleaved)

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "paratorus/errors.hpp"
#include "paratorus/field.hpp"

namespace paratorus {

inline constexpr std::uint32_t kEndianTag = 0x01020304u;

namespace detail {

template <class T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ArgumentError("unexpected end of binary stream");
  return v;
}

}  // namespace detail

inline void write_snapshot(std::ostream& os, const TorusField& f) {
  os.write("PTFS", 4);
  detail::write_pod<std::uint32_t>(os, 1);
  detail::write_pod<std::uint32_t>(os, kEndianTag);
  detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid().n()));
  detail::write_pod<std::uint32_t>(os, f.is_real() ? 0u : 1u);
  for (const auto& v : f.physical()) {
    detail::write_pod<double>(os, v.real());
    if (!f.is_real()) detail::write_pod<double>(os, v.imag());
  }
}

inline TorusField read_snapshot(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), 4);
  if (!is || std::memcmp(magic.data(), "PTFS", 4) != 0) throw ArgumentError("not a field snapshot");
  if (detail::read_pod<std::uint32_t>(is) != 1u) throw ArgumentError("unsupported snapshot version");
  if (detail::read_pod<std::uint32_t>(is) != kEndianTag) {
    throw ArgumentError("snapshot written with a different byte order");
  }
  const int n = static_cast<int>(detail::read_pod<std::uint32_t>(is));
  const bool real = detail::read_pod<std::uint32_t>(is) == 0u;
  Grid g(n);
  std::vector<cplx> values(g.size());
  for (auto& v : values) {
    const double re = detail::read_pod<double>(is);
    const double im = real ? 0.0 : detail::read_pod<double>(is);
    v = cplx(re, im);
  }
  return TorusField::from_physical(g, std::move(values), real);
}

inline void save_snapshot(const std::string& path, const TorusField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ArgumentError("cannot open " + path + " for writing");
  write_snapshot(os, f);
}

inline TorusField load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ArgumentError("cannot open " + path);
  return read_snapshot(is);
}

}  // namespace paratorus
