#pragma once

// Spectral fields over a Grid: scalar, velocity-type vector, symmetric
// tensor (packed upper triangle) and full tensor (gradients).
//
// Storage is component-major: component c occupies the contiguous range
// [c*grid.size(), (c+1)*grid.size()) of Fourier coefficients. Symmetric
// tensors store only i <= j; each component carries a Frobenius weight
// (1 on the diagonal, 2 off it) so that weighted sums over stored
// components equal sums over all d*d matrix entries.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "oldroyd/grid.hpp"

namespace oldroyd {

using complexd = std::complex<double>;

class FieldBase {
public:
    const Grid& grid() const { return grid_; }
    int components() const { return comps_; }
    std::size_t size() const { return grid_.size(); }

    complexd& at(int c, std::size_t i) { return data_[static_cast<std::size_t>(c) * grid_.size() + i]; }
    const complexd& at(int c, std::size_t i) const { return data_[static_cast<std::size_t>(c) * grid_.size() + i]; }

    std::span<complexd> comp(int c) { return {data_.data() + static_cast<std::size_t>(c) * grid_.size(), grid_.size()}; }
    std::span<const complexd> comp(int c) const { return {data_.data() + static_cast<std::size_t>(c) * grid_.size(), grid_.size()}; }

    std::span<complexd> raw() { return {data_.data(), data_.size()}; }
    std::span<const complexd> raw() const { return {data_.data(), data_.size()}; }

    // Frobenius multiplicity of stored component c (2 for off-diagonal
    // symmetric entries, else 1)
    double weight(int c) const { return weights_[static_cast<std::size_t>(c)]; }

    void set_zero() { std::fill(data_.begin(), data_.end(), complexd{0.0, 0.0}); }

    void scale(double s) {
        for (auto& z : data_) z *= s;
    }

    // this += s * other (same shape required)
    void axpy(double s, const FieldBase& other) {
        require_same_shape(other);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * other.data_[i];
    }

    // weighted Frobenius magnitude of the zero-mode coefficient (the mean)
    double mean_magnitude() const {
        double m = 0.0;
        for (int c = 0; c < comps_; ++c)
            m += weights_[static_cast<std::size_t>(c)] * std::norm(at(c, 0));
        return std::sqrt(m);
    }

    // weighted coefficient-space l2 magnitude, sqrt(sum_c w_c |f_c|^2);
    // scale reference for relative tolerances (no volume factor)
    double coeff_norm() const {
        double m = 0.0;
        for (int c = 0; c < comps_; ++c) {
            const complexd* p = data_.data() + static_cast<std::size_t>(c) * grid_.size();
            double acc = 0.0;
            for (std::size_t i = 0; i < grid_.size(); ++i) acc += std::norm(p[i]);
            m += weights_[static_cast<std::size_t>(c)] * acc;
        }
        return std::sqrt(m);
    }

    void require_same_shape(const FieldBase& other) const {
        if (grid_ != other.grid_ || comps_ != other.comps_)
            throw std::invalid_argument("field shape mismatch");
    }

protected:
    FieldBase(const Grid& g, int comps, std::vector<double> weights)
        : grid_(g), comps_(comps), weights_(std::move(weights)),
          data_(static_cast<std::size_t>(comps) * g.size(), complexd{0.0, 0.0}) {}

    Grid grid_;
    int comps_;
    std::vector<double> weights_;
    std::vector<complexd> data_;
};

class ScalarField : public FieldBase {
public:
    explicit ScalarField(const Grid& g) : FieldBase(g, 1, {1.0}) {}
};

class VectorField : public FieldBase {
public:
    explicit VectorField(const Grid& g)
        : FieldBase(g, g.dim(), std::vector<double>(static_cast<std::size_t>(g.dim()), 1.0)) {}
};

// full d x d tensor, component (i,j) stored at index i*d + j; row index i
// is the derivative slot under the gradient convention (grad u)_{ij} = d_i u_j
class TensorField : public FieldBase {
public:
    explicit TensorField(const Grid& g)
        : FieldBase(g, g.dim() * g.dim(),
                    std::vector<double>(static_cast<std::size_t>(g.dim() * g.dim()), 1.0)) {}

    int entry(int i, int j) const { return i * grid_.dim() + j; }
};

// symmetric d x d tensor, packed upper triangle in row order:
//   d=2: (0,0) (0,1) (1,1)
//   d=3: (0,0) (0,1) (0,2) (1,1) (1,2) (2,2)
class SymTensorField : public FieldBase {
public:
    explicit SymTensorField(const Grid& g)
        : FieldBase(g, packed_count(g.dim()), make_weights(g.dim())) {}

    static int packed_count(int d) { return d * (d + 1) / 2; }

    static int pack(int d, int i, int j) {
        if (i > j) std::swap(i, j);
        // offset of row i in the packed upper triangle, then column shift
        return i * d - i * (i - 1) / 2 + (j - i);
    }

    static std::pair<int, int> unpack(int d, int c) {
        for (int i = 0; i < d; ++i) {
            int row = d - i;
            if (c < row) return {i, i + c};
            c -= row;
        }
        throw std::out_of_range("SymTensorField::unpack");
    }

    complexd& entry(int i, int j, std::size_t idx) { return at(pack(grid_.dim(), i, j), idx); }
    const complexd& entry(int i, int j, std::size_t idx) const { return at(pack(grid_.dim(), i, j), idx); }

private:
    static std::vector<double> make_weights(int d) {
        std::vector<double> w;
        for (int c = 0; c < packed_count(d); ++c) {
            auto [i, j] = unpack(d, c);
            w.push_back(i == j ? 1.0 : 2.0);
        }
        return w;
    }
};

// Hermitian-symmetry utilities. Real physical fields satisfy
// coeff(-n) = conj(coeff(n)); products and roundoff can drift, stepping
// re-enforces.

// worst |f(n) - conj(f(-n))| over modes, relative to the field scale
inline double hermitian_drift(const FieldBase& f) {
    const Grid& g = f.grid();
    double worst = 0.0;
    for (int c = 0; c < f.components(); ++c) {
        auto fc = f.comp(c);
        for (std::size_t i = 0; i < g.size(); ++i) {
            std::size_t j = g.conjugate_index(i);
            if (j < i) continue;
            double dev = std::abs(fc[i] - std::conj(fc[j]));
            if (dev > worst) worst = dev;
        }
    }
    double scale = f.coeff_norm();
    return scale > 0.0 ? worst / scale : worst;
}

// project onto the Hermitian-symmetric subspace: f(n), f(-n) are replaced
// by the symmetric pair mean; self-conjugate modes get their imaginary
// part dropped
inline void hermitian_symmetrize(FieldBase& f) {
    const Grid& g = f.grid();
    for (int c = 0; c < f.components(); ++c) {
        auto fc = f.comp(c);
        for (std::size_t i = 0; i < g.size(); ++i) {
            std::size_t j = g.conjugate_index(i);
            if (j < i) continue;
            if (j == i) {
                fc[i] = complexd{fc[i].real(), 0.0};
            } else {
                complexd v = 0.5 * (fc[i] + std::conj(fc[j]));
                fc[i] = v;
                fc[j] = std::conj(v);
            }
        }
    }
}

inline bool all_finite(const FieldBase& f) {
    for (const complexd& z : f.raw())
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

} // namespace oldroyd
