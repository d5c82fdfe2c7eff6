#pragma once

// Homogeneous dyadic decomposition and the Besov / homogeneous Sobolev
// norms built on it.
//
// The radial profile starts from the C^infinity transition
//     h(x) = exp(-1/x) (x > 0),  step(x) = h(x) / (h(x) + h(1-x)),
// giving a raw bump psi supported in (1/2, 2), equal to 1 at r = 1:
//     psi(r) = step(2r - 1) on (1/2, 1],  step(2 - r) on [1, 2).
// The shell-j multiplier is the normalized profile
//     Phi_j(xi) = psi(2^{-j}|xi|) / S(|xi|),  S(r) = sum_k psi(2^{-k} r),
// so sum_j Phi_j(xi) = 1 identically for xi != 0. Two implementation
// choices make that identity (and the scaling law Phi_j(xi) =
// Phi_0(2^{-j} xi)) hold bit-exactly, not just approximately:
//   * floor(log2 r) comes from frexp (exact integer arithmetic, no
//     rounded log),
//   * dyadic rescalings use ldexp (exact),
// so S(2^{-j} r) sums the identical floating-point terms as S(r), in the
// same order. At most two consecutive raw bumps are nonzero at any r.
//
// Shell range on a grid: j_min = floor(log2(2 pi / L)) - 1 and
// j_max = ceil(log2(max lattice |xi|)) + 1. Since shell j only touches
// radii in (2^{j-1}, 2^{j+1}), every lattice radius has all of its
// contributing shells inside [j_min, j_max]; the truncation is exact for
// band-limited (grid) data, with one spare shell on each side.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oldroyd/field.hpp"
#include "oldroyd/grid.hpp"
#include "oldroyd/spectral_ops.hpp"

namespace oldroyd {

class DyadicPartition {
public:
    explicit DyadicPartition(const Grid& g, bool normalized = true)
        : grid_(g), normalized_(normalized) {
        jmin_ = floor_log2(g.k0()) - 1;
        jmax_ = ceil_log2(g.xi_max()) + 1;
        tables_.resize(static_cast<std::size_t>(jmax_ - jmin_ + 1));
        for (int j = jmin_; j <= jmax_; ++j) {
            std::vector<double>& t = tables_[static_cast<std::size_t>(j - jmin_)];
            t.resize(g.size());
            for (std::size_t i = 0; i < g.size(); ++i)
                t[i] = i == 0 ? 0.0 : shell_weight(j, g.xi_norm(i));
        }
    }

    const Grid& grid() const { return grid_; }
    bool normalized() const { return normalized_; }
    int j_min() const { return jmin_; }
    int j_max() const { return jmax_; }
    int shells() const { return jmax_ - jmin_ + 1; }

    const std::vector<double>& shell(int j) const {
        if (j < jmin_ || j > jmax_) throw std::out_of_range("DyadicPartition::shell: j outside range");
        return tables_[static_cast<std::size_t>(j - jmin_)];
    }

    // profile value Phi_j at radius r (table-free evaluation)
    double shell_weight(int j, double r) const {
        if (!(r > 0.0)) return 0.0;
        double b = bump(std::ldexp(r, -j));
        if (b == 0.0) return 0.0;
        return normalized_ ? b / bump_sum(r) : b;
    }

    // worst |sum_j Phi_j(xi) - 1| over nonzero lattice slots
    double partition_residual() const {
        double worst = 0.0;
        for (std::size_t i = 1; i < grid_.size(); ++i) {
            double s = 0.0;
            for (const auto& t : tables_) s += t[i];
            worst = std::max(worst, std::abs(s - 1.0));
        }
        return worst;
    }

    static double bump(double r) {
        if (r <= 0.5 || r >= 2.0) return 0.0;
        if (r <= 1.0) return step(2.0 * r - 1.0);
        return step(2.0 - r);
    }

    // local dyadic sum sum_k bump(2^{-k} r); only k in {floor(log2 r),
    // floor(log2 r)+1} can contribute, the window is kept a little wider
    static double bump_sum(double r) {
        int k0 = floor_log2(r);
        double s = 0.0;
        for (int k = k0 - 2; k <= k0 + 2; ++k) s += bump(std::ldexp(r, -k));
        return s;
    }

    // exact floor(log2 x) for x > 0 via frexp: x = m 2^e, m in [1/2, 1)
    static int floor_log2(double x) {
        if (!(x > 0.0)) throw std::domain_error("floor_log2: x must be positive");
        int e;
        std::frexp(x, &e);
        return e - 1;
    }

    static int ceil_log2(double x) {
        int f = floor_log2(x);
        return std::ldexp(1.0, f) == x ? f : f + 1;
    }

private:
    static double step(double x) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        double a = std::exp(-1.0 / x);
        double b = std::exp(-1.0 / (1.0 - x));
        return a / (a + b);
    }

    Grid grid_;
    bool normalized_;
    int jmin_, jmax_;
    std::vector<std::vector<double>> tables_;
};

// dyadic block: multiply every component by the shell-j table
template <class F>
F block(const F& f, int j, const DyadicPartition& part) {
    if (f.grid() != part.grid()) throw std::invalid_argument("block: partition built on a different grid");
    F out = f;
    if (j < part.j_min() || j > part.j_max()) {
        out.set_zero();
        return out;
    }
    const std::vector<double>& t = part.shell(j);
    for (int c = 0; c < f.components(); ++c) {
        auto oc = out.comp(c);
        for (std::size_t i = 0; i < f.size(); ++i) oc[i] *= t[i];
    }
    return out;
}

// homogeneous Sobolev norm: (L^d sum_{n != 0} w_c |xi|^{2s} |coeff|^2)^{1/2};
// the zero mode never contributes, and negative orders demand a mean-free
// field
template <class F>
double sobolev_norm(const F& f, double s) {
    if (s < 0.0 && f.mean_magnitude() > 1e-12 * f.coeff_norm())
        throw std::domain_error("sobolev_norm: negative order applied to a field with nonzero mean");
    const Grid& g = f.grid();
    double acc = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        double m = s == 0.0 ? 1.0 : std::pow(g.xi_norm2(i), s);
        double term = 0.0;
        for (int c = 0; c < f.components(); ++c) term += f.weight(c) * std::norm(f.at(c, i));
        acc += m * term;
    }
    return std::sqrt(g.volume() * acc);
}

// homogeneous Besov norm: l^r over j of 2^{js} ||block_j f||_{L^p}.
// p = 2 blocks are summed directly in coefficient space (no transforms);
// other p synthesize each block. s <= 0 demands a mean-free field.
template <class F>
double besov_norm(const F& f, double s, double p, double r, const DyadicPartition& part) {
    if (f.grid() != part.grid()) throw std::invalid_argument("besov_norm: partition built on a different grid");
    if (!(p >= 1.0) || !(r >= 1.0))
        throw std::invalid_argument("besov_norm: indices must satisfy p, r in [1, inf]");
    if (s <= 0.0 && f.mean_magnitude() > 1e-12 * f.coeff_norm())
        throw std::domain_error("besov_norm: order s <= 0 applied to a field with nonzero mean");

    const Grid& g = f.grid();
    const double vol = g.volume();
    double acc = 0.0, worst = 0.0;
    for (int j = part.j_min(); j <= part.j_max(); ++j) {
        double blk;
        if (p == 2.0) {
            const std::vector<double>& t = part.shell(j);
            double sum = 0.0;
            for (int c = 0; c < f.components(); ++c) {
                auto fc = f.comp(c);
                double cc = 0.0;
                for (std::size_t i = 0; i < f.size(); ++i) {
                    if (t[i] == 0.0) continue;
                    cc += t[i] * t[i] * std::norm(fc[i]);
                }
                sum += f.weight(c) * cc;
            }
            blk = std::sqrt(vol * sum);
        } else {
            blk = lp_norm(block(f, j, part), p);
        }
        double term = std::pow(2.0, s * j) * blk;
        if (std::isinf(r))
            worst = std::max(worst, term);
        else
            acc += std::pow(term, r);
    }
    return std::isinf(r) ? worst : std::pow(acc, 1.0 / r);
}

} // namespace oldroyd
