#pragma once

// Per-frequency analysis of the linearized system (advection and Q
// dropped):
//
//   d/dt u^ = -mu |xi|^2 P(xi) u^ + mu1 P(xi) (i xi . tau^)
//   d/dt tau^ = -a tau^ + mu2 (i/2)(xi (x) u^ + u^ (x) xi)
//
// Stacked real form. The substitution y = i tau^ removes every factor of
// i, so the generator M is a real matrix of size m = d + d(d+1)/2 acting
// on (u^, y) with y packed like SymTensorField and off-diagonal entries
// scaled by sqrt(2). The scaling makes the Euclidean norm of the stack
// equal |u^|^2 + |tau^|_F^2 (Frobenius), which is what every energy
// statement below refers to.
//
// Properties carried by this construction (all pinned by tests):
//   * weighted dissipativity: for xi.u^ = 0,
//       Re < (mu2 u^, mu1 y), M (u^, y) > = -mu mu2 |xi|^2 |u^|^2 - a mu1 |y|^2,
//     the mode-wise energy identity; it forces Re lambda <= 0.
//   * the full M has one structural zero eigenvalue for xi != 0: the
//     longitudinal u^ direction, which the divergence constraint removes
//     from the dynamics. eigen_analysis therefore restricts M to the
//     invariant subspace {xi.u^ = 0} (+ all of y) before taking spectra;
//     there the abscissa is strictly negative, with d-1 slow eigenvalues
//     ~ -c|xi|^2 (c -> mu + mu1 mu2 / (2a) as |xi| -> 0) and the other
//     d(d+1)/2 tending to -a.
//   * mirror rule: M(-xi) = S M(xi) S with S = diag(I_d, -I), so real
//     fields stay real under the per-mode propagators.
//
// exp(tM) and the phi functions for the exponential integrator come from
// an eigendecomposition of M; if the eigenvector basis is ill-conditioned
// (coalescence), evaluation falls back to Eigen's scaling-and-squaring
// matrix exponential on an augmented block matrix.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "oldroyd/field.hpp"
#include "oldroyd/grid.hpp"
#include "oldroyd/params.hpp"
#include "oldroyd/spectral_ops.hpp"

namespace oldroyd {

inline int stacked_size(int d) { return d + d * (d + 1) / 2; }

// sqrt(2) weight on off-diagonal packed components (isometry with the
// Frobenius norm)
inline double stack_scale(int d, int c) {
    auto [i, j] = SymTensorField::unpack(d, c);
    return i == j ? 1.0 : std::numbers::sqrt2;
}

struct LinearSymbol {
    int d;
    std::array<double, 3> xi;
    double xi2;
    Eigen::MatrixXd M;
};

inline LinearSymbol assemble_symbol(int d, const std::array<double, 3>& xi, const ModelParams& p) {
    const int nsym = d * (d + 1) / 2;
    const int m = d + nsym;
    double xi2 = 0.0;
    for (int ax = 0; ax < d; ++ax) xi2 += xi[ax] * xi[ax];

    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d);
    if (xi2 > 0.0)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) P(i, j) -= xi[i] * xi[j] / xi2;

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    M.topLeftCorner(d, d) = -p.mu * xi2 * P;
    M.bottomRightCorner(nsym, nsym) = -p.a * Eigen::MatrixXd::Identity(nsym, nsym);

    for (int c = 0; c < nsym; ++c) {
        auto [i, j] = SymTensorField::unpack(d, c);
        const double s = stack_scale(d, c);
        // u^ receives the stress divergence: a unit y_c means
        // tau^_{ij} = tau^_{ji} = -i/s, and (i xi . tau^)_l picks up
        // (xi_i delta_{jl} + xi_j delta_{il}) / s
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
        v(j) += xi[i] / s;
        if (i != j) v(i) += xi[j] / s;
        M.block(0, d + c, d, 1) = p.mu1 * (P * v);
        // y receives the strain: d y_c/dt = s * i * mu2 (i/2)(xi_i u^_j
        // + xi_j u^_i) = -(s mu2 / 2)(xi_i u^_j + xi_j u^_i)
        if (i == j) {
            M(d + c, i) = -p.mu2 * xi[i];
        } else {
            M(d + c, j) = -(p.mu2 / std::numbers::sqrt2) * xi[i];
            M(d + c, i) = -(p.mu2 / std::numbers::sqrt2) * xi[j];
        }
    }

    return LinearSymbol{d, xi, xi2, std::move(M)};
}

// stack (u^, i tau^ scaled) into one complex vector in M's coordinates
inline Eigen::VectorXcd encode_mode(int d, const complexd* uhat, const complexd* tauhat) {
    const int nsym = d * (d + 1) / 2;
    Eigen::VectorXcd z(d + nsym);
    for (int c = 0; c < d; ++c) z(c) = uhat[c];
    const complexd iu{0.0, 1.0};
    for (int c = 0; c < nsym; ++c) z(d + c) = stack_scale(d, c) * (iu * tauhat[c]);
    return z;
}

inline void decode_mode(int d, const Eigen::VectorXcd& z, complexd* uhat, complexd* tauhat) {
    const int nsym = d * (d + 1) / 2;
    for (int c = 0; c < d; ++c) uhat[c] = z(c);
    const complexd miu{0.0, -1.0};
    for (int c = 0; c < nsym; ++c) tauhat[c] = miu * z(d + c) / stack_scale(d, c);
}

// residual of the weighted quadratic form identity at one stacked vector;
// zero (to roundoff) whenever xi.u^ = 0
inline double weighted_form_residual(const LinearSymbol& sym, const ModelParams& p, const Eigen::VectorXcd& z) {
    const int d = sym.d;
    Eigen::VectorXcd Mz = sym.M * z;
    double form = 0.0;
    for (int c = 0; c < d; ++c) form += p.mu2 * (std::conj(z(c)) * Mz(c)).real();
    for (int c = d; c < z.size(); ++c) form += p.mu1 * (std::conj(z(c)) * Mz(c)).real();
    double u2 = 0.0, y2 = 0.0;
    for (int c = 0; c < d; ++c) u2 += std::norm(z(c));
    for (int c = d; c < z.size(); ++c) y2 += std::norm(z(c));
    double expected = -p.mu * p.mu2 * sym.xi2 * u2 - p.a * p.mu1 * y2;
    double scale = std::abs(expected) + p.mu * p.mu2 * sym.xi2 * u2 + p.a * p.mu1 * y2 + 1e-300;
    return std::abs(form - expected) / scale;
}

namespace detail {

inline complexd phi1_scalar(complexd z) {
    if (std::abs(z) < 0.5) {
        // sum z^k / (k+1)!
        complexd term{1.0, 0.0}, acc{1.0, 0.0};
        for (int k = 1; k <= 24; ++k) {
            term *= z / static_cast<double>(k + 1);
            acc += term;
        }
        return acc;
    }
    return (std::exp(z) - 1.0) / z;
}

inline complexd phi2_scalar(complexd z) {
    if (std::abs(z) < 0.5) {
        // sum z^k / (k+2)!
        complexd term{0.5, 0.0}, acc{0.5, 0.0};
        for (int k = 1; k <= 24; ++k) {
            term *= z / static_cast<double>(k + 2);
            acc += term;
        }
        return acc;
    }
    return (std::exp(z) - 1.0 - z) / (z * z);
}

} // namespace detail

// exp(tM), phi1(hM), phi2(hM) for one symbol. Eigendecomposition path by
// default; augmented scaling-and-squaring exponential when the eigenbasis
// condition number exceeds 1e8.
class SymbolPropagator {
public:
    explicit SymbolPropagator(const LinearSymbol& sym) : M_(sym.M) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(M_);
        if (es.info() == Eigen::Success) {
            V_ = es.eigenvectors();
            lam_ = es.eigenvalues();
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V_);
            double smin = svd.singularValues()(svd.singularValues().size() - 1);
            double smax = svd.singularValues()(0);
            if (smin > 0.0 && smax / smin <= 1e8) {
                Vinv_ = V_.inverse();
                fallback_ = false;
                return;
            }
        }
        fallback_ = true;
    }

    bool used_fallback() const { return fallback_; }

    Eigen::MatrixXd at(double t) const {
        if (t == 0.0) return Eigen::MatrixXd::Identity(M_.rows(), M_.cols());
        if (fallback_) return (t * M_).exp();
        Eigen::VectorXcd e(lam_.size());
        for (int i = 0; i < lam_.size(); ++i) e(i) = std::exp(t * lam_(i));
        return real_part(V_ * e.asDiagonal() * Vinv_);
    }

    Eigen::MatrixXd phi1(double h) const {
        if (fallback_) return augmented(h, 1);
        Eigen::VectorXcd e(lam_.size());
        for (int i = 0; i < lam_.size(); ++i) e(i) = detail::phi1_scalar(h * lam_(i));
        return real_part(V_ * e.asDiagonal() * Vinv_);
    }

    Eigen::MatrixXd phi2(double h) const {
        if (fallback_) return augmented(h, 2);
        Eigen::VectorXcd e(lam_.size());
        for (int i = 0; i < lam_.size(); ++i) e(i) = detail::phi2_scalar(h * lam_(i));
        return real_part(V_ * e.asDiagonal() * Vinv_);
    }

private:
    static Eigen::MatrixXd real_part(const Eigen::MatrixXcd& A) {
        return A.real();
    }

    // exp of [[hM, I, 0], [0, 0, I], [0, 0, 0]] carries phi1(hM) and
    // phi2(hM) in the top block row
    Eigen::MatrixXd augmented(double h, int which) const {
        const int m = static_cast<int>(M_.rows());
        Eigen::MatrixXd X = Eigen::MatrixXd::Zero(3 * m, 3 * m);
        X.topLeftCorner(m, m) = h * M_;
        X.block(0, m, m, m) = Eigen::MatrixXd::Identity(m, m);
        X.block(m, 2 * m, m, m) = Eigen::MatrixXd::Identity(m, m);
        Eigen::MatrixXd E = X.exp();
        return E.block(0, which * m, m, m);
    }

    Eigen::MatrixXd M_;
    bool fallback_ = false;
    Eigen::MatrixXcd V_, Vinv_;
    Eigen::VectorXcd lam_;
};

struct EigenAnalysis {
    Eigen::VectorXcd eigenvalues;   // on the constrained subspace, Re descending
    double spectral_abscissa = 0.0; // max Re over the constrained spectrum
    int n_slow = 0;                 // d - 1
    double slow_rate_over_xi2 = 0.0;  // mean of -Re(lambda_slow) / |xi|^2
    double fast_gap_to_a = 0.0;       // max |lambda_fast + a| over fast branch
    double slow_tau_to_u = 0.0;       // mean tau/u amplitude ratio of slow eigenvectors
};

// spectrum of M restricted to the physically reachable subspace
// {xi.u^ = 0} + full y block. The longitudinal u^ direction is a
// structural neutral mode (d u^_par/dt = 0) excluded by incompressibility;
// deflating it is what makes "abscissa < 0 for xi != 0" a true statement.
// Slow/fast labels follow Re-ordering and are meaningful in the small-|xi|
// regime (below the branch crossing radius).
inline EigenAnalysis eigen_analysis(const LinearSymbol& sym) {
    if (!(sym.xi2 > 0.0))
        throw std::invalid_argument("eigen_analysis: xi must be nonzero");
    const int d = sym.d;
    const int nsym = d * (d + 1) / 2;
    const int m = d + nsym;

    // orthonormal transverse frame for the u block
    Eigen::VectorXd n(d);
    for (int ax = 0; ax < d; ++ax) n(ax) = sym.xi[ax];
    n.normalize();
    Eigen::MatrixXd T(d, d - 1);
    if (d == 2) {
        T(0, 0) = -n(1);
        T(1, 0) = n(0);
    } else {
        int least = 0;
        for (int ax = 1; ax < 3; ++ax)
            if (std::abs(n(ax)) < std::abs(n(least))) least = ax;
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e(least) = 1.0;
        Eigen::Vector3d nn(n(0), n(1), n(2));
        Eigen::Vector3d t1 = nn.cross(e).normalized();
        Eigen::Vector3d t2 = nn.cross(t1).normalized();
        T.col(0) = t1;
        T.col(1) = t2;
    }

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m - 1);
    B.topLeftCorner(d, d - 1) = T;
    B.block(d, d - 1, nsym, nsym) = Eigen::MatrixXd::Identity(nsym, nsym);

    Eigen::MatrixXd R = B.transpose() * sym.M * B;
    Eigen::EigenSolver<Eigen::MatrixXd> es(R);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigen_analysis: eigensolver failed");

    const int r = m - 1;
    std::vector<int> order(r);
    for (int i = 0; i < r; ++i) order[i] = i;
    Eigen::VectorXcd lam = es.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int a2, int b2) {
        return lam(a2).real() > lam(b2).real();
    });

    EigenAnalysis out;
    out.eigenvalues.resize(r);
    for (int i = 0; i < r; ++i) out.eigenvalues(i) = lam(order[i]);
    out.spectral_abscissa = out.eigenvalues(0).real();
    out.n_slow = d - 1;

    double rate = 0.0, ratio = 0.0;
    for (int i = 0; i < d - 1; ++i) {
        rate += -out.eigenvalues(i).real() / sym.xi2;
        Eigen::VectorXcd w = es.eigenvectors().col(order[i]);
        double uamp = w.head(d - 1).norm();
        double tamp = w.tail(nsym).norm();
        ratio += uamp > 0.0 ? tamp / uamp : 0.0;
    }
    out.slow_rate_over_xi2 = rate / (d - 1);
    out.slow_tau_to_u = ratio / (d - 1);

    // the fast branch converges to -a; record the worst distance
    double gap = 0.0;
    const double a = -sym.M(m - 1, m - 1);
    for (int i = d - 1; i < r; ++i)
        gap = std::max(gap, std::abs(out.eigenvalues(i) - complexd{-a, 0.0}));
    out.fast_gap_to_a = gap;
    return out;
}

// one-shot linear evolution of a full state: every mode advanced by its
// exact propagator. Oracle for the stepped linear-only integrator.
inline void linear_solution(VectorField& u, SymTensorField& tau, const ModelParams& p, double t) {
    const Grid& g = u.grid();
    if (tau.grid() != g) throw std::invalid_argument("linear_solution: grid mismatch");
    const int d = g.dim();
    const int nsym = d * (d + 1) / 2;
    std::vector<complexd> uh(static_cast<std::size_t>(d));
    std::vector<complexd> th(static_cast<std::size_t>(nsym));
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (g.is_nyquist(idx)) continue;
        for (int c = 0; c < d; ++c) uh[static_cast<std::size_t>(c)] = u.at(c, idx);
        for (int c = 0; c < nsym; ++c) th[static_cast<std::size_t>(c)] = tau.at(c, idx);
        LinearSymbol sym = assemble_symbol(d, g.xi(idx), p);
        SymbolPropagator prop(sym);
        Eigen::VectorXcd z = encode_mode(d, uh.data(), th.data());
        Eigen::VectorXcd zt = prop.at(t) * z;
        decode_mode(d, zt, uh.data(), th.data());
        for (int c = 0; c < d; ++c) u.at(c, idx) = uh[static_cast<std::size_t>(c)];
        for (int c = 0; c < nsym; ++c) tau.at(c, idx) = th[static_cast<std::size_t>(c)];
    }
}

} // namespace oldroyd
