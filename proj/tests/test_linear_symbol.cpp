#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "oldroyd/linear_symbol.hpp"
#include "oldroyd/random_fields.hpp"

using namespace oldroyd;

namespace {

constexpr double pi = std::numbers::pi;
const double rt2 = std::numbers::sqrt2;

Eigen::VectorXcd random_stacked(int d, std::uint64_t seed, bool transverse,
                                const std::array<double, 3>& xi) {
    const int m = stacked_size(d);
    KeyedStream ks(mix_key({seed, 0xABCDULL}));
    Eigen::VectorXcd z(m);
    for (int c = 0; c < m; ++c) z(c) = complexd{ks.unit() - 0.5, ks.unit() - 0.5};
    if (transverse) {
        complexd dot{0.0, 0.0};
        double xi2 = 0.0;
        for (int c = 0; c < d; ++c) {
            dot += xi[c] * z(c);
            xi2 += xi[c] * xi[c];
        }
        for (int c = 0; c < d; ++c) z(c) -= xi[c] * dot / xi2;
    }
    return z;
}

double weighted_norm2(const ModelParams& p, int d, const Eigen::VectorXcd& z) {
    double s = 0.0;
    for (int c = 0; c < z.size(); ++c)
        s += (c < d ? p.mu2 : p.mu1) * std::norm(z(c));
    return s;
}

} // namespace

TEST_CASE("symbol entries match the hand formulas at xi = (k, 0)") {
    ModelParams p;
    p.mu = 1.3;
    p.mu1 = 0.7;
    p.mu2 = 2.1;
    p.a = 0.9;
    double k = 1.7;
    LinearSymbol sym = assemble_symbol(2, {k, 0.0, 0.0}, p);
    const Eigen::MatrixXd& M = sym.M;
    REQUIRE(M.rows() == 5);

    // velocity block: -mu k^2 on the transverse direction only
    REQUIRE(M(0, 0) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(M(1, 1) == Catch::Approx(-p.mu * k * k).epsilon(1e-14));
    REQUIRE(M(0, 1) == 0.0);
    REQUIRE(M(1, 0) == 0.0);

    // stress divergence feeds u only through the (0,1) entry
    REQUIRE(M(0, 2) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(M(1, 2) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(M(1, 3) == Catch::Approx(p.mu1 * k / rt2).epsilon(1e-14));
    REQUIRE(M(1, 4) == Catch::Approx(0.0).margin(1e-15));

    // strain feeds the stress rows
    REQUIRE(M(2, 0) == Catch::Approx(-p.mu2 * k).epsilon(1e-14));
    REQUIRE(M(2, 1) == 0.0);
    REQUIRE(M(3, 1) == Catch::Approx(-p.mu2 * k / rt2).epsilon(1e-14));
    REQUIRE(M(3, 0) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(M(4, 1) == Catch::Approx(0.0).margin(1e-15));

    // relaxation on the diagonal of the stress block
    for (int c = 2; c < 5; ++c) REQUIRE(M(c, c) == Catch::Approx(-p.a).epsilon(1e-14));
}

TEST_CASE("the longitudinal direction generates a structural zero mode") {
    ModelParams p;
    p.mu2 = 1.4;
    p.a = 0.6;
    double k = 2.3;
    LinearSymbol sym = assemble_symbol(2, {k, 0.0, 0.0}, p);
    // M (e_long - (mu2 k / a) e_{y00}) = 0
    Eigen::VectorXd v = Eigen::VectorXd::Zero(5);
    v(0) = 1.0;
    v(2) = -p.mu2 * k / p.a;
    REQUIRE((sym.M * v).norm() <= 1e-13 * sym.M.norm() * v.norm());
}

TEST_CASE("encode and decode are inverse up to the stacking isometry") {
    for (int d : {2, 3}) {
        const int nsym = d * (d + 1) / 2;
        KeyedStream ks(mix_key({77ULL, static_cast<std::uint64_t>(d)}));
        std::vector<complexd> u(static_cast<std::size_t>(d)), t(static_cast<std::size_t>(nsym));
        for (auto& z : u) z = complexd{ks.unit(), ks.unit()};
        for (auto& z : t) z = complexd{ks.unit(), ks.unit()};
        Eigen::VectorXcd z = encode_mode(d, u.data(), t.data());
        // off-diagonal slots carry the sqrt(2) Frobenius weight
        REQUIRE(z(d) == complexd{0.0, 1.0} * t[0]);
        std::vector<complexd> u2(u.size()), t2(t.size());
        decode_mode(d, z, u2.data(), t2.data());
        for (std::size_t c = 0; c < u.size(); ++c)
            REQUIRE(std::abs(u[c] - u2[c]) <= 1e-15);
        for (std::size_t c = 0; c < t.size(); ++c)
            REQUIRE(std::abs(t[c] - t2[c]) <= 1e-15);
        // Frobenius norm of tau equals the euclidean norm of the y block
        double fro = 0.0;
        for (int c = 0; c < nsym; ++c) {
            auto [i, j] = SymTensorField::unpack(d, c);
            fro += (i == j ? 1.0 : 2.0) * std::norm(t[static_cast<std::size_t>(c)]);
        }
        double y2 = 0.0;
        for (int c = d; c < z.size(); ++c) y2 += std::norm(z(c));
        REQUIRE(fro == Catch::Approx(y2).epsilon(1e-13));
    }
}

TEST_CASE("weighted form identity holds exactly on the transverse subspace") {
    ModelParams p;
    p.mu = 0.8;
    p.mu1 = 1.9;
    p.mu2 = 0.45;
    p.a = 2.2;
    for (int d : {2, 3}) {
        std::array<double, 3> xi{0.7, -1.2, d == 3 ? 2.1 : 0.0};
        LinearSymbol sym = assemble_symbol(d, xi, p);
        for (std::uint64_t s = 0; s < 20; ++s) {
            Eigen::VectorXcd z = random_stacked(d, s, true, xi);
            REQUIRE(weighted_form_residual(sym, p, z) <= 1e-12);
        }
        // with a longitudinal u component the identity must break
        Eigen::VectorXcd z = random_stacked(d, 5, false, xi);
        REQUIRE(weighted_form_residual(sym, p, z) > 1e-6);
    }
}

TEST_CASE("deflated spectrum has the advertised branch structure") {
    ModelParams p;
    p.mu = 1.1;
    p.mu1 = 0.6;
    p.mu2 = 1.4;
    p.a = 0.8;
    double c_slow = p.mu + p.mu1 * p.mu2 / (2.0 * p.a);
    for (int d : {2, 3}) {
        std::array<double, 3> dir{0.6, 0.8, 0.0};
        if (d == 3) dir = {2.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0};

        double k = 1e-3;
        LinearSymbol sym = assemble_symbol(d, {k * dir[0], k * dir[1], k * dir[2]}, p);
        EigenAnalysis ea = eigen_analysis(sym);
        REQUIRE(ea.n_slow == d - 1);
        REQUIRE(ea.spectral_abscissa < 0.0);
        REQUIRE(ea.slow_rate_over_xi2 == Catch::Approx(c_slow).epsilon(1e-4));
        REQUIRE(ea.fast_gap_to_a <= 1e-3 * p.a);
        // slow eigenvectors carry O(|xi|) stress amplitude
        double predicted = p.mu2 * k / (rt2 * p.a);
        REQUIRE(ea.slow_tau_to_u == Catch::Approx(predicted).epsilon(0.05));

        for (double kk : {0.1, 1.0, 10.0}) {
            LinearSymbol s2 = assemble_symbol(d, {kk * dir[0], kk * dir[1], kk * dir[2]}, p);
            EigenAnalysis e2 = eigen_analysis(s2);
            REQUIRE(e2.spectral_abscissa < 0.0);
            // eigenvalues are sorted by real part, descending
            for (int i = 1; i < e2.eigenvalues.size(); ++i)
                REQUIRE(e2.eigenvalues(i).real() <= e2.eigenvalues(i - 1).real() + 1e-14);
        }
    }
    REQUIRE_THROWS_AS(eigen_analysis(assemble_symbol(2, {0.0, 0.0, 0.0}, p)),
                      std::invalid_argument);
}

TEST_CASE("scalar phi functions agree with their closed forms") {
    for (complexd z : {complexd{0.3, 0.0}, complexd{0.0, 0.49}, complexd{0.51, 0.0},
                       complexd{2.0, 3.0}, complexd{-4.0, 0.1}, complexd{-0.499, 0.0}}) {
        complexd e = std::exp(z);
        complexd p1 = (e - 1.0) / z;
        complexd p2 = (e - 1.0 - z) / (z * z);
        REQUIRE(std::abs(detail::phi1_scalar(z) - p1) <= 1e-13 * std::max(1.0, std::abs(p1)));
        REQUIRE(std::abs(detail::phi2_scalar(z) - p2) <= 1e-13 * std::max(1.0, std::abs(p2)));
    }
    REQUIRE(detail::phi1_scalar(complexd{0.0, 0.0}) == complexd{1.0, 0.0});
    REQUIRE(detail::phi2_scalar(complexd{0.0, 0.0}) == complexd{0.5, 0.0});
}

TEST_CASE("propagator satisfies semigroup, generator, and phi identities") {
    ModelParams p;
    p.mu = 1.2;
    p.mu1 = 0.9;
    p.mu2 = 1.6;
    p.a = 1.1;
    LinearSymbol sym = assemble_symbol(3, {0.9, -0.4, 1.3}, p);
    SymbolPropagator prop(sym);
    REQUIRE_FALSE(prop.used_fallback());
    const int m = stacked_size(3);

    REQUIRE((prop.at(0.0) - Eigen::MatrixXd::Identity(m, m)).norm() == 0.0);

    Eigen::MatrixXd comp = prop.at(0.7) * prop.at(0.4);
    Eigen::MatrixXd direct = prop.at(1.1);
    REQUIRE((comp - direct).norm() <= 1e-10 * direct.norm());

    double h = 1e-6;
    Eigen::MatrixXd approx = (prop.at(h) - Eigen::MatrixXd::Identity(m, m)) / h;
    REQUIRE((approx - sym.M).norm() <= 1e-4 * sym.M.norm());

    // E(h) = I + hM phi1(hM) and phi1(hM) = I + hM phi2(hM)
    for (double hh : {1e-3, 0.1, 1.0}) {
        Eigen::MatrixXd E = prop.at(hh);
        Eigen::MatrixXd P1 = prop.phi1(hh);
        Eigen::MatrixXd P2 = prop.phi2(hh);
        Eigen::MatrixXd i1 = Eigen::MatrixXd::Identity(m, m) + hh * sym.M * P1;
        Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(m, m) + hh * sym.M * P2;
        REQUIRE((E - i1).norm() <= 1e-12 * std::max(1.0, E.norm()));
        REQUIRE((P1 - i2).norm() <= 1e-12 * std::max(1.0, P1.norm()));
    }
}

TEST_CASE("weighted energy of transverse data never grows under the flow") {
    ModelParams p;
    p.mu = 0.7;
    p.mu1 = 1.3;
    p.mu2 = 0.8;
    p.a = 1.7;
    std::array<double, 3> xi{1.1, 0.4, -0.8};
    LinearSymbol sym = assemble_symbol(3, xi, p);
    SymbolPropagator prop(sym);
    for (std::uint64_t s = 0; s < 10; ++s) {
        Eigen::VectorXcd z = random_stacked(3, 100 + s, true, xi);
        double prev = weighted_norm2(p, 3, z);
        for (double t : {0.1, 0.5, 1.0, 3.0, 10.0}) {
            double cur = weighted_norm2(p, 3, prop.at(t) * z);
            REQUIRE(cur <= prev * (1.0 + 1e-12));
            prev = cur;
        }
    }
}

TEST_CASE("defective symbols take the augmented exponential fallback") {
    // Jordan block J = [[-1, 1], [0, -1]] padded with a distinct diagonal:
    // the eigenbasis is singular, so the eigen path must refuse
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(3, 3);
    M(0, 0) = -1.0;
    M(0, 1) = 1.0;
    M(1, 1) = -1.0;
    M(2, 2) = -2.0;
    LinearSymbol sym{2, {1.0, 0.0, 0.0}, 1.0, M};
    SymbolPropagator prop(sym);
    REQUIRE(prop.used_fallback());

    double t = 0.8;
    Eigen::MatrixXd E = prop.at(t);
    // exp(tJ) = e^{-t} [[1, t], [0, 1]]
    REQUIRE(E(0, 0) == Catch::Approx(std::exp(-t)).epsilon(1e-12));
    REQUIRE(E(0, 1) == Catch::Approx(t * std::exp(-t)).epsilon(1e-12));
    REQUIRE(E(1, 0) == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(E(2, 2) == Catch::Approx(std::exp(-2.0 * t)).epsilon(1e-12));

    // the augmented route still satisfies E = I + hM phi1(hM)
    Eigen::MatrixXd P1 = prop.phi1(t);
    Eigen::MatrixXd P2 = prop.phi2(t);
    Eigen::MatrixXd i1 = Eigen::MatrixXd::Identity(3, 3) + t * M * P1;
    Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(3, 3) + t * M * P2;
    REQUIRE((E - i1).norm() <= 1e-12);
    REQUIRE((P1 - i2).norm() <= 1e-12);
}

TEST_CASE("whole-field linear solution agrees with per-mode propagation") {
    Grid g(2, 16, 2.0 * pi);
    ModelParams p;
    p.mu = 1.0;
    p.mu1 = 0.5;
    p.mu2 = 1.5;
    p.a = 0.9;
    SpectrumShape shape;
    shape.exponent = -1.0;
    shape.cutoff = 5.0;
    VectorField u = random_solenoidal(g, 3, tags::sweep_a, shape);
    SymTensorField tau = random_symtensor(g, 3, tags::sweep_b, shape);

    VectorField u_t = u;
    SymTensorField tau_t = tau;
    double t = 0.6;
    linear_solution(u_t, tau_t, p, t);
    REQUIRE(hermitian_drift(u_t) <= 1e-13);
    REQUIRE(hermitian_drift(tau_t) <= 1e-13);

    for (std::array<int, 3> n : {std::array<int, 3>{1, 0, 0}, {2, -3, 0}, {0, 5, 0}}) {
        std::size_t i = g.index_of_wave(n);
        std::vector<complexd> uh(2), th(3);
        for (int c = 0; c < 2; ++c) uh[static_cast<std::size_t>(c)] = u.at(c, i);
        for (int c = 0; c < 3; ++c) th[static_cast<std::size_t>(c)] = tau.at(c, i);
        SymbolPropagator prop(assemble_symbol(2, g.xi(i), p));
        Eigen::VectorXcd z = prop.at(t) * encode_mode(2, uh.data(), th.data());
        decode_mode(2, z, uh.data(), th.data());
        for (int c = 0; c < 2; ++c)
            REQUIRE(std::abs(u_t.at(c, i) - uh[static_cast<std::size_t>(c)]) <= 1e-12);
        for (int c = 0; c < 3; ++c)
            REQUIRE(std::abs(tau_t.at(c, i) - th[static_cast<std::size_t>(c)]) <= 1e-12);
    }
}
