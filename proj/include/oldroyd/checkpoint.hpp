#pragma once

// Checkpoint container for a simulation state. Layout (all multi-byte
// values little-endian):
//
//   bytes 0..3   magic "OLDB"
//   u64          format version (1)
//   u64          d
//   u64          N (modes per axis)
//   f64          L (box length)
//   f64 x 5      mu, mu1, mu2, a, b
//   f64          t
//   then         complex coefficients as (re, im) f64 pairs:
//                u components 0..d-1, then packed tau components,
//                each in lattice row-major order
//
// Round trips are bit-exact: doubles are moved through their raw byte
// representation, never reformatted.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "oldroyd/dynamics.hpp"
#include "oldroyd/field.hpp"
#include "oldroyd/grid.hpp"
#include "oldroyd/params.hpp"

namespace oldroyd {

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

inline void put_f64(std::ostream& out, double x) {
    put_u64(out, std::bit_cast<std::uint64_t>(x));
}

inline std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("checkpoint: truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline double get_f64(std::istream& in) {
    return std::bit_cast<double>(get_u64(in));
}

inline void put_field(std::ostream& out, const FieldBase& f) {
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t i = 0; i < f.size(); ++i) {
            put_f64(out, f.at(c, i).real());
            put_f64(out, f.at(c, i).imag());
        }
}

inline void get_field(std::istream& in, FieldBase& f) {
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t i = 0; i < f.size(); ++i) {
            double re = get_f64(in);
            double im = get_f64(in);
            f.at(c, i) = complexd{re, im};
        }
}

} // namespace detail

inline constexpr std::uint64_t checkpoint_version = 1;

inline void save_checkpoint(const std::string& path, const SimulationState& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
    out.write("OLDB", 4);
    detail::put_u64(out, checkpoint_version);
    const Grid& g = s.grid();
    detail::put_u64(out, static_cast<std::uint64_t>(g.dim()));
    detail::put_u64(out, static_cast<std::uint64_t>(g.modes()));
    detail::put_f64(out, g.box());
    detail::put_f64(out, s.params.mu);
    detail::put_f64(out, s.params.mu1);
    detail::put_f64(out, s.params.mu2);
    detail::put_f64(out, s.params.a);
    detail::put_f64(out, s.params.b);
    detail::put_f64(out, s.t);
    detail::put_field(out, s.u);
    detail::put_field(out, s.tau);
    if (!out) throw std::runtime_error("checkpoint: write failed for '" + path + "'");
}

inline SimulationState load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "OLDB", 4) != 0)
        throw std::runtime_error("checkpoint: '" + path + "' is not a checkpoint file");
    std::uint64_t version = detail::get_u64(in);
    if (version != checkpoint_version)
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    int d = static_cast<int>(detail::get_u64(in));
    int n = static_cast<int>(detail::get_u64(in));
    double L = detail::get_f64(in);
    ModelParams p;
    p.mu = detail::get_f64(in);
    p.mu1 = detail::get_f64(in);
    p.mu2 = detail::get_f64(in);
    p.a = detail::get_f64(in);
    p.b = detail::get_f64(in);
    Grid g(d, n, L);
    SimulationState s(g, p);
    s.t = detail::get_f64(in);
    detail::get_field(in, s.u);
    detail::get_field(in, s.tau);
    char extra;
    if (in.read(&extra, 1))
        throw std::runtime_error("checkpoint: trailing bytes in '" + path + "'");
    return s;
}

} // namespace oldroyd
