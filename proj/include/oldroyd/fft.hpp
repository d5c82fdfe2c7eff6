#pragma once

// FFTW3 wrapper for the transform pair used throughout:
//
//   forward:  real samples f(x_k) -> coefficients, scaled by 1/N^d, so a
//             pure mode f(x) = exp(i xi(n).x) lands as coeff(n) = 1
//   inverse:  coefficients -> real samples (unscaled backward transform,
//             imaginary parts discarded; they are roundoff for
//             Hermitian-symmetric input)
//
// Plans are created once per (d, N) with FFTW_ESTIMATE | FFTW_UNALIGNED and
// cached behind a mutex. ESTIMATE keeps planning deterministic (MEASURE
// introduces timing-dependent plan choices, which perturbs the last ulp of
// results run to run); UNALIGNED lets plans execute on ordinary
// caller-provided buffers via fftw_execute_dft, which is thread-safe for
// distinct buffers. Scratch buffers are thread_local.

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "oldroyd/grid.hpp"
#include "oldroyd/field.hpp"

namespace oldroyd {

namespace detail {
inline std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}
inline int& fftw_thread_count() {
    static int n = 1;
    return n;
}
} // namespace detail

// set before any plan is created (the CLI does this at startup);
// takes effect only when linked against fftw3_threads
inline void set_fft_threads(int n) {
    if (n < 1) n = 1;
    std::lock_guard<std::mutex> lock(detail::fftw_mutex());
#ifdef OLDROYD_FFTW_THREADS
    static bool initialized = false;
    if (!initialized) {
        fftw_init_threads();
        initialized = true;
    }
    fftw_plan_with_nthreads(n);
#endif
    detail::fftw_thread_count() = n;
}

class Fft {
public:
    static const Fft& get(const Grid& g) {
        std::lock_guard<std::mutex> lock(detail::fftw_mutex());
        static std::map<std::pair<int, int>, std::unique_ptr<Fft>> cache;
        auto key = std::make_pair(g.dim(), g.modes());
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, std::unique_ptr<Fft>(new Fft(g))).first;
        return *it->second;
    }

    // real samples (row-major, grid.size() of them) -> scaled coefficients
    void forward(std::span<const double> phys, std::span<complexd> coef) const {
        check_sizes(phys.size(), coef.size());
        std::vector<complexd>& in = scratch();
        for (std::size_t i = 0; i < size_; ++i) in[i] = complexd{phys[i], 0.0};
        fftw_execute_dft(fwd_,
                         reinterpret_cast<fftw_complex*>(in.data()),
                         reinterpret_cast<fftw_complex*>(coef.data()));
        const double s = scale_;
        for (std::size_t i = 0; i < size_; ++i) coef[i] *= s;
    }

    // coefficients -> real samples; imaginary residue of the synthesis is
    // dropped (callers needing it can use inverse_complex)
    void inverse(std::span<const complexd> coef, std::span<double> phys) const {
        check_sizes(phys.size(), coef.size());
        std::vector<complexd>& out = scratch();
        std::vector<complexd>& in = scratch2();
        std::copy(coef.begin(), coef.end(), in.begin());
        fftw_execute_dft(bwd_,
                         reinterpret_cast<fftw_complex*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
        for (std::size_t i = 0; i < size_; ++i) phys[i] = out[i].real();
    }

    void inverse_complex(std::span<const complexd> coef, std::span<complexd> out) const {
        if (coef.size() != size_ || out.size() != size_)
            throw std::invalid_argument("Fft: buffer size mismatch");
        std::vector<complexd>& in = scratch2();
        std::copy(coef.begin(), coef.end(), in.begin());
        fftw_execute_dft(bwd_,
                         reinterpret_cast<fftw_complex*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
    }

    std::size_t size() const { return size_; }

    ~Fft() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }

    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

private:
    explicit Fft(const Grid& g) : size_(g.size()), scale_(1.0 / static_cast<double>(g.size())) {
        int n[3] = {g.modes(), g.modes(), g.modes()};
        std::vector<complexd> a(size_), b(size_);
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_dft(g.dim(), n,
                             reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()),
                             FFTW_FORWARD, flags);
        bwd_ = fftw_plan_dft(g.dim(), n,
                             reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()),
                             FFTW_BACKWARD, flags);
        if (!fwd_ || !bwd_) throw std::runtime_error("Fft: plan creation failed");
    }

    void check_sizes(std::size_t p, std::size_t c) const {
        if (p != size_ || c != size_)
            throw std::invalid_argument("Fft: buffer size mismatch");
    }

    std::vector<complexd>& scratch() const {
        thread_local std::vector<complexd> buf;
        if (buf.size() < size_) buf.resize(size_);
        return buf;
    }
    std::vector<complexd>& scratch2() const {
        thread_local std::vector<complexd> buf;
        if (buf.size() < size_) buf.resize(size_);
        return buf;
    }

    std::size_t size_;
    double scale_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

} // namespace oldroyd
