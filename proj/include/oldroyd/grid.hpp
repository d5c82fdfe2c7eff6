#pragma once

// Periodic lattice [0, L)^d with the Fourier-side index conventions used
// everywhere else in the library.
//
// Conventions, fixed once here:
//   * d is 2 or 3; N (modes per axis) is even and >= 8.
//   * physical samples live at x_k = k * L/N, flat index row-major with
//     axis 0 slowest;
//   * storage slot k on an axis carries the integer mode
//     n = k < N/2 ? k : k - N, so n ranges over [-N/2, N/2); the slot
//     k = N/2 is the unpaired Nyquist mode n = -N/2 and is kept zero by
//     every producer of spectral data;
//   * the physical wavenumber is xi = (2*pi/L) * n.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace oldroyd {

class Grid {
public:
    Grid(int dim, int modes, double box)
        : d_(dim), n_(modes), box_(box) {
        if (d_ != 2 && d_ != 3)
            throw std::invalid_argument("Grid: dimension must be 2 or 3, got " + std::to_string(d_));
        if (n_ < 8 || n_ % 2 != 0)
            throw std::invalid_argument("Grid: modes per axis must be even and >= 8, got " + std::to_string(n_));
        if (!(box_ > 0.0))
            throw std::invalid_argument("Grid: box length must be positive");
        size_ = 1;
        for (int i = 0; i < d_; ++i) size_ *= static_cast<std::size_t>(n_);
    }

    int dim() const { return d_; }
    int modes() const { return n_; }
    double box() const { return box_; }
    std::size_t size() const { return size_; }

    double dx() const { return box_ / n_; }
    double volume() const { return std::pow(box_, d_); }
    double cell_volume() const { return std::pow(dx(), d_); }
    // fundamental wavenumber 2*pi/L; lattice wavenumbers are integer multiples
    double k0() const { return 2.0 * std::numbers::pi / box_; }

    bool operator==(const Grid& o) const {
        return d_ == o.d_ && n_ == o.n_ && box_ == o.box_;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }

    // flat index <-> per-axis storage slots (row-major, axis 0 slowest)
    std::array<int, 3> slots(std::size_t flat) const {
        std::array<int, 3> k{0, 0, 0};
        for (int ax = d_ - 1; ax >= 0; --ax) {
            k[ax] = static_cast<int>(flat % n_);
            flat /= n_;
        }
        return k;
    }

    std::size_t flat_from_slots(const std::array<int, 3>& k) const {
        std::size_t f = 0;
        for (int ax = 0; ax < d_; ++ax)
            f = f * n_ + static_cast<std::size_t>(k[ax]);
        return f;
    }

    // integer modes n_i in [-N/2, N/2)
    std::array<int, 3> wave(std::size_t flat) const {
        std::array<int, 3> k = slots(flat);
        for (int ax = 0; ax < d_; ++ax)
            if (k[ax] >= n_ / 2) k[ax] -= n_;
        return k;
    }

    std::size_t index_of_wave(const std::array<int, 3>& n) const {
        std::array<int, 3> k{0, 0, 0};
        for (int ax = 0; ax < d_; ++ax) {
            int m = n[ax] % n_;
            if (m < 0) m += n_;
            k[ax] = m;
        }
        return flat_from_slots(k);
    }

    // flat index of the mirror mode -n (the Hermitian partner)
    std::size_t conjugate_index(std::size_t flat) const {
        std::array<int, 3> k = slots(flat);
        for (int ax = 0; ax < d_; ++ax)
            k[ax] = (n_ - k[ax]) % n_;
        return flat_from_slots(k);
    }

    // true if any axis carries the unpaired mode n = -N/2
    bool is_nyquist(std::size_t flat) const {
        std::array<int, 3> k = slots(flat);
        for (int ax = 0; ax < d_; ++ax)
            if (k[ax] == n_ / 2) return true;
        return false;
    }

    std::array<double, 3> xi(std::size_t flat) const {
        std::array<int, 3> n = wave(flat);
        const double c = k0();
        return {c * n[0], c * n[1], c * n[2]};
    }

    double xi_norm2(std::size_t flat) const {
        std::array<double, 3> x = xi(flat);
        return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    }

    double xi_norm(std::size_t flat) const { return std::sqrt(xi_norm2(flat)); }

    // largest |xi| over all lattice slots (the Nyquist corner); used to
    // size dyadic shell ranges so coverage holds at every lattice point
    double xi_max() const {
        double m = static_cast<double>(n_ / 2);
        return k0() * m * std::sqrt(static_cast<double>(d_));
    }

    // physical sample position for a flat index
    std::array<double, 3> x(std::size_t flat) const {
        std::array<int, 3> k = slots(flat);
        const double h = dx();
        return {h * k[0], h * k[1], h * k[2]};
    }

private:
    int d_;
    int n_;
    double box_;
    std::size_t size_;
};

} // namespace oldroyd
