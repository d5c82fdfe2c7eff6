#pragma once

// Time integration of the coupled velocity/stress system
//
//   d/dt u + u.grad u - mu Lap u = -grad pi + mu1 div tau,   div u = 0,
//   d/dt tau + u.grad tau + a tau + Q(grad u, tau) = mu2 D(u),
//
// on the periodic lattice. The stepper is ETDRK2: the complete linear
// part (viscosity, damping, and the mu1/mu2 cross coupling) is advanced
// by the exact per-mode propagator from linear_symbol, so only the
// quadratic terms see a truncation error. With the nonlinear stage
// disabled the scheme IS the exact solution operator, which is what the
// linear-decay comparisons rely on.
//
//   a    = E z + h phi1(hM) N(z)
//   z'   = a + h phi2(hM) (N(a) - N(z))
//
// E, h phi1, h phi2 are cached per mode for the fixed step size; memory
// is modes * 3 m^2 doubles (about 10 MB at 128^2, 64 MB at 32^3).
//
// Per step the state is re-projected onto its invariant manifold
// (Hermitian symmetry, div u = 0, zero u mean, zero Nyquist slots) and
// the pre-projection drift is measured and reported; the step also
// enforces the advective CFL restriction dt <= c_cfl dx / |u|_inf before
// touching the state and scans for non-finite output after.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oldroyd/field.hpp"
#include "oldroyd/grid.hpp"
#include "oldroyd/linear_symbol.hpp"
#include "oldroyd/littlewood_paley.hpp"
#include "oldroyd/monitors.hpp"
#include "oldroyd/params.hpp"
#include "oldroyd/q_bilinear.hpp"
#include "oldroyd/random_fields.hpp"
#include "oldroyd/series.hpp"
#include "oldroyd/spectral_ops.hpp"

namespace oldroyd {

class blow_up_error : public std::runtime_error {
public:
    explicit blow_up_error(double t)
        : std::runtime_error("non-finite state at t = " + std::to_string(t)), t_(t) {}
    double t() const { return t_; }

private:
    double t_;
};

class cfl_error : public std::runtime_error {
public:
    cfl_error(double t, double dt, double dt_max)
        : std::runtime_error("advective stability violated at t = " + std::to_string(t)
                             + ": dt = " + std::to_string(dt) + " exceeds "
                             + std::to_string(dt_max)),
          t_(t), dt_max_(dt_max) {}
    double t() const { return t_; }
    double dt_max() const { return dt_max_; }

private:
    double t_, dt_max_;
};

struct SimulationState {
    VectorField u;
    SymTensorField tau;
    double t = 0.0;
    ModelParams params;

    SimulationState(const Grid& g, const ModelParams& p) : u(g), tau(g), params(p) {
        p.validate();
    }

    const Grid& grid() const { return u.grid(); }

    // invariant guard: finite coefficients, mean-free u, u close to
    // divergence-free (loose bound; per-step drift is separately required
    // to stay below 1e-10)
    void validate() const {
        if (!all_finite(u) || !all_finite(tau))
            throw std::invalid_argument("SimulationState: non-finite coefficients");
        if (u.mean_magnitude() > 1e-12 * (u.coeff_norm() + 1e-300))
            throw std::invalid_argument("SimulationState: u must be mean-free");
        if (divergence_residual(u) > 1e-8)
            throw std::invalid_argument("SimulationState: u is not divergence-free");
    }
};

// full right-hand side, pressure eliminated by Leray projection:
//   du/dt  = P[-u.grad u + mu Lap u + mu1 div tau]
//   dtau/dt = -u.grad tau - a tau - Q(grad u, tau) + mu2 D(u)
// Reference form for convergence tests; the stepper itself splits
// linear from nonlinear.
inline std::pair<VectorField, SymTensorField> rhs(const SimulationState& s) {
    s.validate();
    const ModelParams& p = s.params;

    VectorField du = laplacian(s.u);
    du.scale(p.mu);
    du.axpy(-1.0, advect(s.u, s.u));
    du.axpy(p.mu1, divergence(s.tau));
    du = leray_project(du);
    zero_nyquist(du);

    SymTensorField dtau = advect(s.u, s.tau);
    dtau.scale(-1.0);
    dtau.axpy(-p.a, s.tau);
    dtau.axpy(-1.0, compute_Q(s.u, s.tau, p.b));
    dtau.axpy(p.mu2, deformation(s.u));
    zero_nyquist(dtau);

    return {std::move(du), std::move(dtau)};
}

// quadratic terms only: N_u = P[-u.grad u], N_tau = -u.grad tau - Q.
// u_max (pointwise Euclidean sup of the dealiased velocity) rides along
// for the stability check.
struct NonlinearTerms {
    VectorField u;
    SymTensorField tau;
    double u_max = 0.0;
};

inline NonlinearTerms nonlinear_rhs(const VectorField& u, const SymTensorField& tau, double b) {
    const Grid& g = u.grid();

    VectorField nu = advect(u, u);
    nu.scale(-1.0);
    nu = leray_project(nu);
    zero_mean(nu);

    SymTensorField ntau = advect(u, tau);
    ntau.scale(-1.0);
    ntau.axpy(-1.0, compute_Q(u, tau, b));

    std::vector<double> phys = to_physical(dealias(u));
    double m2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double s = 0.0;
        for (int c = 0; c < g.dim(); ++c) {
            double v = phys[static_cast<std::size_t>(c) * g.size() + i];
            s += v * v;
        }
        m2 = std::max(m2, s);
    }

    return {std::move(nu), std::move(ntau), std::sqrt(m2)};
}

struct StepDrift {
    double hermitian = 0.0;   // worst relative conjugate-pair defect before re-projection
    double divergence = 0.0;  // divergence residual of u before re-projection
};

class Stepper {
public:
    Stepper(const Grid& g, const ModelParams& p, double dt,
            bool linear_only = false, double c_cfl = 0.5)
        : grid_(g), params_(p), dt_(dt), linear_only_(linear_only), c_cfl_(c_cfl),
          m_(stacked_size(g.dim())) {
        if (!(dt > 0.0)) throw std::invalid_argument("Stepper: dt must be positive");
        p.validate();
        const int d = g.dim();
        const int nsym = d * (d + 1) / 2;
        scale_.resize(static_cast<std::size_t>(nsym));
        for (int c = 0; c < nsym; ++c) scale_[static_cast<std::size_t>(c)] = stack_scale(d, c);

        const std::size_t mm = static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_);
        E_.assign(g.size() * mm, 0.0);
        P1_.assign(g.size() * mm, 0.0);
        P2_.assign(g.size() * mm, 0.0);
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            // Nyquist slots keep zero matrices: they are annihilated every
            // step instead of propagated
            if (g.is_nyquist(idx)) continue;
            LinearSymbol sym = assemble_symbol(d, g.xi(idx), p);
            SymbolPropagator prop(sym);
            Eigen::MatrixXd E = prop.at(dt);
            Eigen::MatrixXd F1 = dt * prop.phi1(dt);
            Eigen::MatrixXd F2 = dt * prop.phi2(dt);
            double* e = E_.data() + idx * mm;
            double* f1 = P1_.data() + idx * mm;
            double* f2 = P2_.data() + idx * mm;
            for (int r = 0; r < m_; ++r)
                for (int c = 0; c < m_; ++c) {
                    e[r * m_ + c] = E(r, c);
                    f1[r * m_ + c] = F1(r, c);
                    f2[r * m_ + c] = F2(r, c);
                }
        }
    }

    double dt() const { return dt_; }
    bool linear_only() const { return linear_only_; }

    // advance s by one step of dt in place; returns the measured
    // pre-projection drift
    StepDrift step(SimulationState& s) const {
        if (s.grid() != grid_) throw std::invalid_argument("Stepper: state on a different grid");
        const std::size_t n = grid_.size();
        const std::size_t mm = static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_);

        std::vector<complexd> z(n * static_cast<std::size_t>(m_));
        std::vector<complexd> za(n * static_cast<std::size_t>(m_));
        std::vector<complexd> n1, n2;

        if (!linear_only_) {
            NonlinearTerms t1 = nonlinear_rhs(s.u, s.tau, s.params.b);
            if (t1.u_max > 0.0) {
                double dt_max = c_cfl_ * grid_.dx() / t1.u_max;
                if (dt_ > dt_max) throw cfl_error(s.t, dt_, dt_max);
            }
            n1.resize(z.size());
            gather(t1.u, t1.tau, n1);
        }

        gather(s.u, s.tau, z);
        for (std::size_t idx = 0; idx < n; ++idx) {
            const double* e = E_.data() + idx * mm;
            apply(e, &z[idx * m_], &za[idx * m_]);
            if (!linear_only_) {
                const double* f1 = P1_.data() + idx * mm;
                accumulate(f1, &n1[idx * m_], &za[idx * m_]);
            }
        }

        if (!linear_only_) {
            SimulationState mid(grid_, s.params);
            scatter(za, mid.u, mid.tau);
            NonlinearTerms t2 = nonlinear_rhs(mid.u, mid.tau, s.params.b);
            n2.resize(z.size());
            gather(t2.u, t2.tau, n2);
            for (std::size_t i = 0; i < n2.size(); ++i) n2[i] -= n1[i];
            for (std::size_t idx = 0; idx < n; ++idx) {
                const double* f2 = P2_.data() + idx * mm;
                accumulate(f2, &n2[idx * m_], &za[idx * m_]);
            }
        }

        scatter(za, s.u, s.tau);
        s.t += dt_;

        if (!all_finite(s.u) || !all_finite(s.tau)) throw blow_up_error(s.t);

        StepDrift drift;
        drift.hermitian = std::max(hermitian_drift(s.u), hermitian_drift(s.tau));
        drift.divergence = divergence_residual(s.u);
        hermitian_symmetrize(s.u);
        hermitian_symmetrize(s.tau);
        s.u = leray_project(s.u);
        zero_mean(s.u);
        return drift;
    }

private:
    // stack (u^, i tau^) with the sqrt(2) off-diagonal weights
    void gather(const VectorField& u, const SymTensorField& tau, std::vector<complexd>& out) const {
        const int d = grid_.dim();
        const int nsym = m_ - d;
        for (std::size_t idx = 0; idx < grid_.size(); ++idx) {
            complexd* zp = out.data() + idx * static_cast<std::size_t>(m_);
            for (int c = 0; c < d; ++c) zp[c] = u.at(c, idx);
            for (int c = 0; c < nsym; ++c) {
                complexd t = tau.at(c, idx);
                zp[d + c] = scale_[static_cast<std::size_t>(c)] * complexd{-t.imag(), t.real()};
            }
        }
    }

    void scatter(const std::vector<complexd>& in, VectorField& u, SymTensorField& tau) const {
        const int d = grid_.dim();
        const int nsym = m_ - d;
        for (std::size_t idx = 0; idx < grid_.size(); ++idx) {
            const complexd* zp = in.data() + idx * static_cast<std::size_t>(m_);
            for (int c = 0; c < d; ++c) u.at(c, idx) = zp[c];
            for (int c = 0; c < nsym; ++c) {
                complexd y = zp[d + c] / scale_[static_cast<std::size_t>(c)];
                tau.at(c, idx) = complexd{y.imag(), -y.real()};
            }
        }
    }

    // out = A x (real m x m, row-major, complex vector)
    void apply(const double* A, const complexd* x, complexd* out) const {
        for (int r = 0; r < m_; ++r) {
            double re = 0.0, im = 0.0;
            const double* row = A + r * m_;
            for (int c = 0; c < m_; ++c) {
                re += row[c] * x[c].real();
                im += row[c] * x[c].imag();
            }
            out[r] = complexd{re, im};
        }
    }

    // out += A x
    void accumulate(const double* A, const complexd* x, complexd* out) const {
        for (int r = 0; r < m_; ++r) {
            double re = 0.0, im = 0.0;
            const double* row = A + r * m_;
            for (int c = 0; c < m_; ++c) {
                re += row[c] * x[c].real();
                im += row[c] * x[c].imag();
            }
            out[r] += complexd{re, im};
        }
    }

    Grid grid_;
    ModelParams params_;
    double dt_;
    bool linear_only_;
    double c_cfl_;
    int m_;
    std::vector<double> scale_;
    std::vector<double> E_, P1_, P2_;
};

// ------------------------------------------------------------- initial data

struct InitialDataSpec {
    std::uint64_t seed = 1;
    double epsilon = 1e-2;   // target value of the critical-norm sum
    double sigma = 0.5;      // negative-order membership index, 0 <= sigma < d/2
    double epsilon0 = 0.1;   // profile shift: |coef| ~ r^{sigma - d/2 + epsilon0} at low r
    double cutoff = 4.0;     // amplitude rolls off rapidly above this radius
    double rolloff = 0.25;   // tail width as a fraction of cutoff

    void validate(int d) const {
        if (!(sigma >= 0.0 && 2.0 * sigma < d))
            throw std::invalid_argument("InitialDataSpec: sigma must satisfy 0 <= sigma < d/2");
        if (!(epsilon >= 0.0)) throw std::invalid_argument("InitialDataSpec: epsilon must be >= 0");
        if (!(epsilon0 > 0.0)) throw std::invalid_argument("InitialDataSpec: epsilon0 must be > 0");
        if (!(cutoff > 0.0 && rolloff > 0.0))
            throw std::invalid_argument("InitialDataSpec: cutoff and rolloff must be > 0");
    }
};

// random-phase pair with low-frequency profile |coef| ~ r^{sigma - d/2 + epsilon0}
// (inside the negative-order space with room epsilon0 to spare), u
// solenoidal and mean-free, both dealiased, jointly rescaled so that
//   ||u||_{B^{d/2-1}_{2,1}} + ||tau||_{B^{d/2}_{2,1}} = epsilon
// holds exactly
inline std::pair<VectorField, SymTensorField> make_initial_data(const InitialDataSpec& spec, const Grid& g) {
    spec.validate(g.dim());
    if (spec.epsilon == 0.0) return {VectorField(g), SymTensorField(g)};

    SpectrumShape shape;
    shape.exponent = spec.sigma - 0.5 * g.dim() + spec.epsilon0;
    shape.cutoff = spec.cutoff;
    shape.rolloff = spec.rolloff;

    VectorField u = dealias(random_solenoidal(g, spec.seed, tags::initial_u, shape));
    SymTensorField tau = dealias(random_symtensor(g, spec.seed, tags::initial_tau, shape));

    DyadicPartition part(g);
    double half_d = 0.5 * g.dim();
    double total = besov_norm(u, half_d - 1.0, 2.0, 1.0, part)
                 + besov_norm(tau, half_d, 2.0, 1.0, part);
    double r = spec.epsilon / total;
    u.scale(r);
    tau.scale(r);
    return {std::move(u), std::move(tau)};
}

// ---------------------------------------------------------------- recording

// norm columns written at every output time. Orders in k_list get energy,
// dissipation and cancellation columns; sigma > 0 adds the negative-order
// group (computed on mean-centered tau, with the removed mean logged).
struct RecorderSpec {
    double cadence = 0.1;                  // target time between rows
    std::vector<double> k_list = {0.0, 1.0};
    double sigma = 0.5;                    // <= 0 disables the negative-order group
    double interp_s = 1.0;                 // order probed by the interpolation column
    void validate(int d) const {
        if (!(cadence > 0.0)) throw std::invalid_argument("RecorderSpec: cadence must be > 0");
        for (double k : k_list)
            if (!(k >= 0.0)) throw std::invalid_argument("RecorderSpec: orders must be >= 0");
        if (sigma > 0.0 && !(2.0 * sigma < d))
            throw std::invalid_argument("RecorderSpec: sigma must satisfy sigma < d/2");
    }
};

namespace detail {

inline std::string order_suffix(double k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", k);
    return buf;
}

inline std::vector<std::string> recorder_labels(const RecorderSpec& rec) {
    std::vector<std::string> L = {"u_L2", "tau_L2"};
    for (double k : rec.k_list) {
        std::string s = order_suffix(k);
        L.push_back("u_H" + s);
        L.push_back("tau_H" + s);
        L.push_back("E_H" + s);
        L.push_back("D_H" + s);
        L.push_back("cancel_H" + s);
    }
    if (rec.sigma > 0.0) {
        std::string s = order_suffix(rec.sigma);
        L.push_back("u_Hm" + s);
        L.push_back("tau_Hm" + s);
        L.push_back("E_Hm" + s);
        L.push_back("negsob_rhs");
        L.push_back("tau_mean");
    }
    L.insert(L.end(), {"u_Bcrit", "tau_Bcrit", "u_Bhigh", "interp_excess",
                       "div_drift", "herm_drift", "u_max"});
    return L;
}

inline std::vector<double> recorder_row(const SimulationState& s, const RecorderSpec& rec,
                                        const DyadicPartition& part, const StepDrift& drift) {
    const Grid& g = s.grid();
    const ModelParams& p = s.params;
    std::vector<double> row;
    row.push_back(spectral_l2(s.u));
    row.push_back(spectral_l2(s.tau));
    for (double k : rec.k_list) {
        double nu = sobolev_norm(s.u, k);
        double nt = sobolev_norm(s.tau, k);
        row.push_back(nu);
        row.push_back(nt);
        row.push_back(p.mu2 * nu * nu + p.mu1 * nt * nt);
        row.push_back(dissipation_hk(s.u, s.tau, p, k));
        row.push_back(cancellation_check(s.u, s.tau, k));
    }
    if (rec.sigma > 0.0) {
        SymTensorField centered = s.tau;
        zero_mean(centered);
        double nu = sobolev_norm(s.u, -rec.sigma);
        double nt = sobolev_norm(centered, -rec.sigma);
        row.push_back(nu);
        row.push_back(nt);
        row.push_back(p.mu2 * nu * nu + p.mu1 * nt * nt);
        row.push_back(negative_growth_rhs(s.u, centered, p, rec.sigma));
        row.push_back(s.tau.mean_magnitude());
    }
    double half_d = 0.5 * g.dim();
    row.push_back(besov_norm(s.u, half_d - 1.0, 2.0, 1.0, part));
    row.push_back(besov_norm(s.tau, half_d, 2.0, 1.0, part));
    row.push_back(besov_norm(s.u, half_d + 1.0, 2.0, 1.0, part));
    row.push_back(interpolation_excess(s.u, rec.interp_s,
                                       rec.sigma > 0.0 ? rec.sigma : 0.5));
    row.push_back(drift.divergence);
    row.push_back(drift.hermitian);

    std::vector<double> phys = to_physical(dealias(s.u));
    double m2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double acc = 0.0;
        for (int c = 0; c < g.dim(); ++c) {
            double v = phys[static_cast<std::size_t>(c) * g.size() + i];
            acc += v * v;
        }
        m2 = std::max(m2, acc);
    }
    row.push_back(std::sqrt(m2));
    return row;
}

} // namespace detail

struct SimulationResult {
    NormSeries series;
    SimulationState state;    // final on success, last good on failure
    bool completed = false;
    std::string failure;      // empty when completed
};

// advance to T with uniform steps (dt is nudged to divide T - t0 exactly),
// sampling all recorder columns every `cadence` (and at both endpoints).
// Drift columns carry the worst per-step value since the previous row.
// A step failure (stability or blow-up) preserves the partial series.
inline SimulationResult simulate(SimulationState s, double dt, double T, const RecorderSpec& rec,
                                 bool linear_only = false,
                                 const std::function<void(const SimulationState&)>& on_sample = {}) {
    if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
    rec.validate(s.grid().dim());
    s.validate();

    SimulationResult out{NormSeries{}, std::move(s), true, ""};
    out.series.labels = detail::recorder_labels(rec);
    if (!(T > out.state.t)) return out;   // T = 0 (or in the past): empty series, state unchanged

    const double span = T - out.state.t;
    const std::size_t n_steps = static_cast<std::size_t>(std::max<long long>(1, std::llround(span / dt)));
    const double h = span / static_cast<double>(n_steps);
    const std::size_t steps_per_row =
        static_cast<std::size_t>(std::max<long long>(1, std::llround(rec.cadence / h)));

    DyadicPartition part(out.state.grid());
    Stepper stepper(out.state.grid(), out.state.params, h, linear_only);

    StepDrift initial;
    initial.hermitian = std::max(hermitian_drift(out.state.u), hermitian_drift(out.state.tau));
    initial.divergence = divergence_residual(out.state.u);
    out.series.append(out.state.t, detail::recorder_row(out.state, rec, part, initial));
    if (on_sample) on_sample(out.state);

    StepDrift since_row;
    for (std::size_t i = 1; i <= n_steps; ++i) {
        try {
            StepDrift d = stepper.step(out.state);
            since_row.hermitian = std::max(since_row.hermitian, d.hermitian);
            since_row.divergence = std::max(since_row.divergence, d.divergence);
        } catch (const std::runtime_error& e) {
            out.completed = false;
            out.failure = e.what();
            return out;
        }
        if (i % steps_per_row == 0 || i == n_steps) {
            out.series.append(out.state.t, detail::recorder_row(out.state, rec, part, since_row));
            if (on_sample) on_sample(out.state);
            since_row = StepDrift{};
        }
    }
    return out;
}

} // namespace oldroyd
