#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oldroyd/monitors.hpp"
#include "oldroyd/random_fields.hpp"

using namespace oldroyd;

namespace {

constexpr double pi = std::numbers::pi;

void set_cosine(FieldBase& f, int c, const std::array<int, 3>& n, double amp = 1.0) {
    const Grid& g = f.grid();
    std::size_t i = g.index_of_wave(n);
    f.at(c, i) = complexd{amp, 0.0};
    f.at(c, g.conjugate_index(i)) = complexd{amp, 0.0};
}

} // namespace

TEST_CASE("energy and dissipation orders are wired correctly") {
    Grid g(2, 16, 2.0 * pi);
    ModelParams p;
    p.mu = 1.3;
    p.mu1 = 0.7;
    p.mu2 = 2.0;
    p.a = 0.4;
    VectorField u(g);
    SymTensorField tau(g);
    set_cosine(u, 1, {2, 1, 0}, 0.3);
    set_cosine(tau, SymTensorField::pack(2, 0, 0), {1, 1, 0}, 0.5);

    double V = g.volume();
    double xi2_u = 5.0, xi2_t = 2.0;
    double u2 = V * 2.0 * 0.09;   // two conjugate slots
    double t2 = V * 2.0 * 0.25;

    double ek = energy_hk(u, tau, p, 1.0);
    REQUIRE(ek == Catch::Approx(p.mu2 * xi2_u * u2 + p.mu1 * xi2_t * t2).epsilon(1e-12));

    double dk = dissipation_hk(u, tau, p, 1.0);
    REQUIRE(dk == Catch::Approx(p.mu * p.mu2 * xi2_u * xi2_u * u2
                                + p.a * p.mu1 * xi2_t * t2).epsilon(1e-12));

    double ne = negative_energy(u, tau, p, 0.5);
    REQUIRE(ne == Catch::Approx(p.mu2 * u2 / std::sqrt(xi2_u)
                                + p.mu1 * t2 / std::sqrt(xi2_t)).epsilon(1e-12));
    REQUIRE_THROWS_AS(negative_energy(u, tau, p, 1.0), std::invalid_argument);
}

TEST_CASE("to_full mirrors the packed triangle") {
    Grid g(3, 8, 2.0 * pi);
    SpectrumShape shape;
    SymTensorField t = random_symtensor(g, 5, tags::sweep_a, shape);
    TensorField f = to_full(t);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                REQUIRE(f.at(f.entry(r, c), i) == t.entry(r, c, i));
}

TEST_CASE("stress-strain cancellation is exact for symmetric stress") {
    SpectrumShape shape;
    shape.exponent = -0.5;
    shape.cutoff = 6.0;
    for (int d : {2, 3}) {
        Grid g(d, d == 2 ? 32 : 16, 2.0 * pi);
        VectorField u = random_solenoidal(g, 61, tags::sweep_a, shape);
        SymTensorField tau = random_symtensor(g, 62, tags::sweep_b, shape);
        for (double k : {0.0, 1.0, 2.5})
            REQUIRE(cancellation_check(u, tau, k) <= 1e-12);
    }
}

TEST_CASE("cancellation fails for antisymmetric stress") {
    Grid g(2, 16, 2.0 * pi);
    SpectrumShape shape;
    shape.exponent = 0.0;
    shape.cutoff = 4.0;
    VectorField u = random_solenoidal(g, 63, tags::sweep_a, shape);
    ScalarField w = random_scalar(g, 64, tags::sweep_b, shape);
    TensorField anti(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        anti.at(anti.entry(0, 1), i) = w.at(0, i);
        anti.at(anti.entry(1, 0), i) = -w.at(0, i);
    }
    REQUIRE(cancellation_check(u, anti, 0.0) > 1e-3);
}

TEST_CASE("interpolation excess is nonpositive and tight on one shell") {
    Grid g(2, 32, 2.0 * pi);
    SpectrumShape shape;
    shape.exponent = -1.0;
    shape.cutoff = 9.0;
    for (int i = 0; i < 50; ++i) {
        ScalarField f = random_scalar(g, 100 + static_cast<std::uint64_t>(i),
                                      tags::sweep_c, shape);
        f.scale(1.0 / f.coeff_norm());
        REQUIRE(interpolation_excess(f, 1.0, 0.5) <= 1e-12);
        REQUIRE(interpolation_excess(f, 2.0, 1.0 - 1e-9) <= 1e-12);
    }
    // a single |xi| magnitude saturates the Hoelder bound
    ScalarField one(g);
    set_cosine(one, 0, {3, 4, 0}, 0.7); // |xi| = 5 on every populated slot
    double e = interpolation_excess(one, 1.0, 0.5);
    REQUIRE(std::abs(e) <= 1e-13);
    REQUIRE_THROWS_AS(interpolation_excess(one, -0.5, 0.5), std::invalid_argument);
}

TEST_CASE("negative-order growth rhs selects the documented case split") {
    SpectrumShape shape;
    shape.exponent = -1.0;
    shape.cutoff = 5.0;
    ModelParams p;
    p.mu1 = 0.8;
    p.mu2 = 1.7;

    // d = 3, 2 sigma <= d - 2: odd-dimension branch, here with alpha = 0
    {
        Grid g(3, 12, 2.0 * pi);
        VectorField u = random_solenoidal(g, 71, tags::sweep_a, shape);
        SymTensorField tau = random_symtensor(g, 72, tags::sweep_b, shape);
        double sigma = 0.5;
        double expect = std::pow(sobolev_norm(u, 1.0), 2.0)
                            * (p.mu2 * sobolev_norm(u, -sigma))
                      + sobolev_norm(u, 1.0) * sobolev_norm(tau, 1.0)
                            * (p.mu1 * sobolev_norm(tau, -sigma));
        REQUIRE(negative_growth_rhs(u, tau, p, sigma)
                == Catch::Approx(expect).epsilon(1e-12));

        // sigma above (d-2)/2 falls through to the low-regularity branch
        double s2 = 1.2;
        double ga = 2.0 * s2 / 3.0;
        double mid = std::pow(spectral_l2(u), ga)
                   * std::pow(sobolev_norm(u, 1.5), 1.0 - ga);
        double expect2 = mid * (sobolev_norm(u, 1.0) * p.mu2 * sobolev_norm(u, -s2)
                                + sobolev_norm(tau, 1.0) * p.mu1 * sobolev_norm(tau, -s2));
        REQUIRE(negative_growth_rhs(u, tau, p, s2)
                == Catch::Approx(expect2).epsilon(1e-12));
    }

    // d = 2 always uses the low-regularity branch
    {
        Grid g(2, 16, 2.0 * pi);
        VectorField u = random_solenoidal(g, 73, tags::sweep_a, shape);
        SymTensorField tau = random_symtensor(g, 74, tags::sweep_b, shape);
        double sigma = 0.5;
        double ga = sigma;
        double mid = std::pow(spectral_l2(u), ga) * std::pow(sobolev_norm(u, 1.0), 1.0 - ga);
        double expect = mid * (sobolev_norm(u, 1.0) * p.mu2 * sobolev_norm(u, -sigma)
                               + sobolev_norm(tau, 1.0) * p.mu1 * sobolev_norm(tau, -sigma));
        REQUIRE(negative_growth_rhs(u, tau, p, sigma)
                == Catch::Approx(expect).epsilon(1e-12));
        REQUIRE_THROWS_AS(negative_growth_rhs(u, tau, p, 1.0), std::invalid_argument);
    }
}

TEST_CASE("lyapunov check accepts decay and flags growth") {
    std::vector<double> t{0.0, 1.0, 2.0, 3.0};
    std::vector<double> down{4.0, 2.0, 1.0, 0.5};
    LyapunovReport ok = lyapunov_check(t, down);
    REQUIRE(ok.pass());
    REQUIRE(ok.worst_interval <= 0.0);

    std::vector<double> bump{4.0, 2.0, 3.0, 0.5};
    LyapunovReport bad = lyapunov_check(t, bump);
    REQUIRE_FALSE(bad.monotone_pass);
    REQUIRE(bad.worst_interval == Catch::Approx(0.5));
    REQUIRE(bad.worst_interval_at == 1);

    REQUIRE_THROWS_AS(lyapunov_check({0.0}, {1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(lyapunov_check(t, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("lyapunov dissipation slack behaves like the half-count design") {
    // E = e^{-t} sampled finely; D = half the true dissipation leaves
    // enough slack for the trapezoid error, the full D does not
    std::vector<double> t, E, Dhalf, Dfull;
    for (int i = 0; i <= 40; ++i) {
        double ti = 0.05 * i;
        t.push_back(ti);
        E.push_back(std::exp(-ti));
        Dhalf.push_back(0.5 * std::exp(-ti));
        Dfull.push_back(std::exp(-ti));
    }
    LyapunovReport half = lyapunov_check(t, E, Dhalf);
    REQUIRE(half.pass());
    // the worst trackers clamp at zero, so staying there means the
    // inequality never came close to the tolerance
    REQUIRE(half.worst_dissipative == 0.0);
    REQUIRE(half.worst_integrated == 0.0);

    LyapunovReport full = lyapunov_check(t, E, Dfull);
    REQUIRE_FALSE(full.dissipative_pass); // trapezoid overshoot beats 1e-9
}

TEST_CASE("besov functional is the running sup plus running integral") {
    std::vector<double> t{0.0, 1.0};
    std::vector<double> uc{2.0, 1.0}, tc{1.0, 1.0}, uh{4.0, 2.0};
    std::vector<double> E = besov_functional_E(t, uc, tc, uh, 1.0, 1.0);
    REQUIRE(E.size() == 2);
    REQUIRE(E[0] == Catch::Approx(3.0));
    REQUIRE(E[1] == Catch::Approx(7.0)); // sup still 3, integral (5+3)/2
    // values never decrease even when the norms do
    REQUIRE(E[1] >= E[0]);

    std::vector<double> w = besov_functional_E(t, uc, tc, uh, 1.0, 2.0);
    REQUIRE(w[0] == Catch::Approx(4.0));
}

TEST_CASE("negative sobolev verdict applies the factor-two threshold") {
    BoundednessReport ok = negative_sobolev_verdict({1.0, 1.5, 1.9, 0.3});
    REQUIRE(ok.bounded);
    REQUIRE(ok.peak == Catch::Approx(1.9));
    BoundednessReport bad = negative_sobolev_verdict({1.0, 2.5});
    REQUIRE_FALSE(bad.bounded);
    REQUIRE_THROWS_AS(negative_sobolev_verdict({}), std::invalid_argument);
}

TEST_CASE("fit recovers exact power laws") {
    std::vector<double> t, v;
    for (int i = 0; i <= 60; ++i) {
        double ti = std::pow(10.0, -1.0 + 0.08 * i);
        t.push_back(ti);
        v.push_back(3.0 * std::pow(1.0 + ti, -1.7));
    }
    FitResult fit = fit_decay(t, v, 1.0, 300.0);
    REQUIRE(fit.slope == Catch::Approx(-1.7).margin(1e-12));
    REQUIRE(fit.intercept == Catch::Approx(std::log(3.0)).margin(1e-12));
    REQUIRE(fit.residual_rms <= 1e-13);
    REQUIRE(fit.algebraic);
    REQUIRE(fit.count >= 8);
}

TEST_CASE("fit flags exponential decay as non-algebraic") {
    std::vector<double> t, v;
    for (int i = 0; i <= 30; ++i) {
        double ti = 10.0 + 3.0 * i;
        t.push_back(ti);
        v.push_back(std::exp(-3.0 * ti));
    }
    FitResult fit = fit_decay(t, v, 10.0, 100.0);
    REQUIRE_FALSE(fit.algebraic);
    REQUIRE(fit.slope < -5.0);
}

TEST_CASE("degenerate fit windows are rejected with a reason") {
    std::vector<double> t{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
    std::vector<double> v(t.size(), 1.0);
    // too few samples inside the window
    REQUIRE_THROWS_WITH(fit_decay(t, v, 8.5, 9.5),
                        Catch::Matchers::ContainsSubstring("degenerate window"));
    // nonpositive values
    std::vector<double> vneg = v;
    vneg[4] = 0.0;
    REQUIRE_THROWS_WITH(fit_decay(t, vneg, 1.0, 10.0),
                        Catch::Matchers::ContainsSubstring("degenerate window"));
}

TEST_CASE("ratio summaries expose max and median") {
    RatioStats odd = summarize_ratios({3.0, 1.0, 2.0});
    REQUIRE(odd.count == 3);
    REQUIRE(odd.max == 3.0);
    REQUIRE(odd.median == 2.0);
    REQUIRE(odd.max_over_median == Catch::Approx(1.5));
    RatioStats even = summarize_ratios({1.0, 2.0, 3.0, 4.0});
    REQUIRE(even.median == Catch::Approx(2.5));
    REQUIRE_THROWS_AS(summarize_ratios({}), std::invalid_argument);
}

TEST_CASE("commutator checks run under validated exponent configs") {
    Grid g(2, 32, 2.0 * pi);
    DyadicPartition part(g);
    SpectrumShape shape;
    shape.exponent = -1.0;
    shape.cutoff = 8.0;
    shape.jitter = true;
    VectorField u = random_solenoidal(g, 81, tags::sweep_a, shape);
    ScalarField v = random_scalar(g, 82, tags::sweep_b, shape);

    CommutatorResult res = commutator_check(u, v, 1.0, part);
    REQUIRE(res.lhs > 0.0);
    REQUIRE(res.rhs > 0.0);
    REQUIRE(res.ratio == Catch::Approx(res.lhs / res.rhs).epsilon(1e-12));
    REQUIRE(res.ratio < 20.0);
    REQUIRE(res.shell_lhs.size() == static_cast<std::size_t>(part.shells()));

    CommutatorConfig bad;
    bad.q1 = 3.0; // 1/2 != 0 + 1/3
    REQUIRE_THROWS_AS(commutator_check(u, v, 1.0, part, bad), std::invalid_argument);
    REQUIRE_THROWS_AS(commutator_check(u, v, -1.5, part), std::invalid_argument);
}

TEST_CASE("product estimate stays uniformly bounded on random data") {
    Grid g(2, 32, 2.0 * pi);
    DyadicPartition part(g);
    SpectrumShape shape;
    shape.exponent = -1.0;
    shape.cutoff = 8.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        VectorField u = random_solenoidal(g, 90 + s, tags::sweep_a, shape);
        SymTensorField tau = random_symtensor(g, 90 + s, tags::sweep_b, shape);
        double ratio = product_estimate_check(u, tau, 0.5, part);
        REQUIRE(ratio > 0.0);
        REQUIRE(ratio < 20.0);
    }
}

TEST_CASE("bernstein ratios respect the dyadic envelope on every shell") {
    Grid g(2, 64, 2.0 * pi);
    DyadicPartition part(g);
    SpectrumShape shape;
    shape.exponent = -0.5;
    shape.cutoff = 20.0;
    shape.jitter = true;
    ScalarField f = random_scalar(g, 91, tags::sweep_c, shape);
    for (double k : {0.5, 1.0})
        for (int j = part.j_min(); j <= part.j_max(); ++j) {
            double r = bernstein_derivative_ratio(f, j, k, 2.0, part);
            if (r == 0.0) continue;
            REQUIRE(r >= std::pow(2.0, -2.0 * k));
            REQUIRE(r <= std::pow(2.0, 2.0 * k));
        }
    // embedding ratio: L^inf against L^2 with the dimensional factor
    for (int j = part.j_min(); j <= part.j_max(); ++j) {
        double r = bernstein_embedding_ratio(f, j, 2.0,
                                             std::numeric_limits<double>::infinity(), part);
        if (r == 0.0) continue;
        REQUIRE(r > 0.0);
        REQUIRE(r < 10.0);
    }
    REQUIRE_THROWS_AS(bernstein_embedding_ratio(f, 2,
                          std::numeric_limits<double>::infinity(), 2.0, part),
                      std::invalid_argument);
}

TEST_CASE("trapezoid step is the midpoint-weighted increment") {
    REQUIRE(trapezoid_step(0.0, 2.0, 1.0, 3.0) == Catch::Approx(4.0));
    REQUIRE(trapezoid_step(1.0, 1.5, 2.0, 2.0) == Catch::Approx(1.0));
}
