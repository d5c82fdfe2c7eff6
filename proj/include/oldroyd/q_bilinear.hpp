#pragma once

// The objective-derivative bilinearity
//     Q(grad u, tau) = tau Omega - Omega tau + b (D tau + tau D),
// with Omega = (grad u - grad u^T)/2 and D = (grad u + grad u^T)/2,
// evaluated pointwise in physical space with dealiased inputs. b = 0 is
// the corotational convention, b = +/-1 the convected ones.
//
// Each unordered entry (i, j) is computed once and stored in the packed
// upper triangle, so the output is symmetric exactly, independent of
// roundoff (the commutator with antisymmetric Omega and the
// anticommutator with D are both symmetric for symmetric tau).

#include <vector>

#include "oldroyd/field.hpp"
#include "oldroyd/spectral_ops.hpp"

namespace oldroyd {

inline SymTensorField compute_Q(const TensorField& grad_u, const SymTensorField& tau, double b) {
    if (grad_u.grid() != tau.grid()) throw std::invalid_argument("compute_Q: grid mismatch");
    const Grid& g = grad_u.grid();
    const int d = g.dim();
    const std::size_t n = g.size();

    std::vector<double> gu = to_physical(dealias(grad_u));
    std::vector<double> tp = to_physical(dealias(tau));

    auto guv = [&](int i, int j, std::size_t x) { return gu[static_cast<std::size_t>(i * d + j) * n + x]; };
    auto tv = [&](int i, int j, std::size_t x) {
        return tp[static_cast<std::size_t>(SymTensorField::pack(d, i, j)) * n + x];
    };

    SymTensorField out(g);
    std::vector<double> q(static_cast<std::size_t>(SymTensorField::packed_count(d)) * n);
    for (std::size_t x = 0; x < n; ++x) {
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                double acc = 0.0;
                for (int k = 0; k < d; ++k) {
                    double D_kj = 0.5 * (guv(k, j, x) + guv(j, k, x));
                    double D_ik = 0.5 * (guv(i, k, x) + guv(k, i, x));
                    double W_kj = 0.5 * (guv(k, j, x) - guv(j, k, x));
                    double W_ik = 0.5 * (guv(i, k, x) - guv(k, i, x));
                    acc += tv(i, k, x) * W_kj - W_ik * tv(k, j, x)
                         + b * (D_ik * tv(k, j, x) + tv(i, k, x) * D_kj);
                }
                q[static_cast<std::size_t>(SymTensorField::pack(d, i, j)) * n + x] = acc;
            }
        }
    }
    from_physical(out, q);
    return dealias(out);
}

inline SymTensorField compute_Q(const VectorField& u, const SymTensorField& tau, double b) {
    return compute_Q(gradient(u), tau, b);
}

} // namespace oldroyd
