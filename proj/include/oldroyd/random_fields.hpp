#pragma once

// Deterministic random-phase spectral synthesis.
//
// Reproducibility contract: a single master seed expands into independent
// per-(field tag, mode, component) streams through splitmix64 key mixing.
// The generator is pinned here (not std::mt19937 or any distribution from
// the standard library, whose outputs are implementation-defined), so
// identical seeds give identical fields on any platform. Because every
// mode draws from its own stream, refining the grid N -> 2N reproduces
// all shared modes exactly; only newly resolved high modes are added.
//
// Amplitudes follow a deterministic radial profile
//     A(r) = r^exponent                   for r <= cutoff,
//     A(r) = cutoff^exponent * gauss tail above (width rolloff * cutoff),
// optionally jittered per mode by a keyed factor in [1/2, 3/2]. Phases are
// uniform. Hermitian symmetry is built in by drawing each (n, -n) pair
// from the lexicographically positive representative.

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

#include "oldroyd/field.hpp"
#include "oldroyd/grid.hpp"
#include "oldroyd/spectral_ops.hpp"

namespace oldroyd {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// fold a list of words into one key by chaining the mixer
inline std::uint64_t mix_key(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t s = 0x243f6a8885a308d3ULL;
    for (std::uint64_t p : parts) {
        s ^= p;
        (void)splitmix64_next(s);
    }
    return s;
}

// one keyed stream; unit() yields doubles in [0, 1)
struct KeyedStream {
    std::uint64_t state;
    explicit KeyedStream(std::uint64_t key) : state(key) {}
    double unit() {
        return static_cast<double>(splitmix64_next(state) >> 11) * 0x1.0p-53;
    }
    double phase() { return 2.0 * std::numbers::pi * unit(); }
};

struct SpectrumShape {
    double exponent = 0.0;  // low-frequency power law r^exponent
    double cutoff = 4.0;    // profile switches to rapid rolloff above
    double rolloff = 0.25;  // tail width as a fraction of cutoff
    bool jitter = false;    // keyed per-mode amplitude factor in [1/2, 3/2]

    double amplitude(double r) const {
        if (!(r > 0.0)) return 0.0;
        if (r <= cutoff) return std::pow(r, exponent);
        double w = rolloff * cutoff;
        double t = (r - cutoff) / w;
        return std::pow(cutoff, exponent) * std::exp(-t * t);
    }
};

namespace detail {
// lexicographic choice of one representative per {n, -n} pair
inline bool is_canonical_wave(const std::array<int, 3>& n, int d) {
    for (int ax = 0; ax < d; ++ax) {
        if (n[ax] > 0) return true;
        if (n[ax] < 0) return false;
    }
    return true; // the zero mode (never drawn)
}
} // namespace detail

// fill f with a Hermitian-symmetric random-phase field: mean-free, Nyquist
// slots zero, coefficients A(|xi|) e^{i theta(n, c)}
inline void fill_random(FieldBase& f, std::uint64_t seed, std::uint64_t tag, const SpectrumShape& shape) {
    const Grid& g = f.grid();
    f.set_zero();
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (g.is_nyquist(i)) continue;
        std::array<int, 3> n = g.wave(i);
        bool canon = detail::is_canonical_wave(n, g.dim());
        std::array<int, 3> rep = n;
        if (!canon)
            for (int ax = 0; ax < g.dim(); ++ax) rep[ax] = -n[ax];
        double amp = shape.amplitude(g.xi_norm(i));
        for (int c = 0; c < f.components(); ++c) {
            KeyedStream ks(mix_key({seed, tag,
                                    static_cast<std::uint64_t>(static_cast<std::int64_t>(rep[0])),
                                    static_cast<std::uint64_t>(static_cast<std::int64_t>(rep[1])),
                                    static_cast<std::uint64_t>(static_cast<std::int64_t>(rep[2])),
                                    static_cast<std::uint64_t>(c)}));
            double theta = ks.phase();
            double a = amp;
            if (shape.jitter) a *= 0.5 + ks.unit();
            complexd z = a * complexd{std::cos(theta), std::sin(theta)};
            f.at(c, i) = canon ? z : std::conj(z);
        }
    }
}

inline ScalarField random_scalar(const Grid& g, std::uint64_t seed, std::uint64_t tag, const SpectrumShape& shape) {
    ScalarField f(g);
    fill_random(f, seed, tag, shape);
    return f;
}

inline VectorField random_vector(const Grid& g, std::uint64_t seed, std::uint64_t tag, const SpectrumShape& shape) {
    VectorField f(g);
    fill_random(f, seed, tag, shape);
    return f;
}

// divergence-free random velocity (Leray projection of a random vector)
inline VectorField random_solenoidal(const Grid& g, std::uint64_t seed, std::uint64_t tag, const SpectrumShape& shape) {
    VectorField f(g);
    fill_random(f, seed, tag, shape);
    VectorField out = leray_project(f);
    zero_mean(out);
    return out;
}

inline SymTensorField random_symtensor(const Grid& g, std::uint64_t seed, std::uint64_t tag, const SpectrumShape& shape) {
    SymTensorField f(g);
    fill_random(f, seed, tag, shape);
    return f;
}

// field tags (stream separators; values are arbitrary but frozen)
namespace tags {
inline constexpr std::uint64_t initial_u = 0x75303030ULL;
inline constexpr std::uint64_t initial_tau = 0x74617530ULL;
inline constexpr std::uint64_t sweep_a = 0x73774141ULL;
inline constexpr std::uint64_t sweep_b = 0x73774242ULL;
inline constexpr std::uint64_t sweep_c = 0x73774343ULL;
} // namespace tags

} // namespace oldroyd
