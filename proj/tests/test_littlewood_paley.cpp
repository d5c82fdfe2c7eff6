#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oldroyd/littlewood_paley.hpp"
#include "oldroyd/random_fields.hpp"

using namespace oldroyd;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("raw bump has the advertised support and peak") {
    REQUIRE(DyadicPartition::bump(0.5) == 0.0);
    REQUIRE(DyadicPartition::bump(2.0) == 0.0);
    REQUIRE(DyadicPartition::bump(0.25) == 0.0);
    REQUIRE(DyadicPartition::bump(1.0) == 1.0);
    REQUIRE(DyadicPartition::bump(0.7) > 0.0);
    REQUIRE(DyadicPartition::bump(1.9) > 0.0);
    // complementary transition: neighbors sum to one
    for (double r : {1.1, 1.3, 1.5, 1.75, 1.9}) {
        double s = DyadicPartition::bump(r) + DyadicPartition::bump(r / 2.0);
        REQUIRE(s == Catch::Approx(1.0).margin(1e-15));
    }
}

TEST_CASE("floor and ceil log2 are exact at powers of two") {
    REQUIRE(DyadicPartition::floor_log2(1.0) == 0);
    REQUIRE(DyadicPartition::floor_log2(0.5) == -1);
    REQUIRE(DyadicPartition::floor_log2(8.0) == 3);
    REQUIRE(DyadicPartition::floor_log2(7.99) == 2);
    REQUIRE(DyadicPartition::ceil_log2(8.0) == 3);
    REQUIRE(DyadicPartition::ceil_log2(8.01) == 4);
    REQUIRE(DyadicPartition::ceil_log2(0.3) == -1);
    REQUIRE_THROWS_AS(DyadicPartition::floor_log2(0.0), std::domain_error);
}

TEST_CASE("shell profile obeys the dyadic scaling law bit-exactly") {
    Grid g(2, 32, 2.0 * pi);
    DyadicPartition part(g);
    for (double r : {0.37, 1.0, 1.7, 3.14159, 11.3, 29.0})
        for (int j = -2; j <= 5; ++j)
            REQUIRE(part.shell_weight(j, r) == part.shell_weight(0, std::ldexp(r, -j)));
}

TEST_CASE("partition of unity holds on every nonzero lattice mode") {
    // includes an irrational box so radii are not dyadic-friendly
    struct Case { int d, n; double L; };
    for (Case c : {Case{2, 64, 2.0 * pi}, Case{3, 32, 2.0 * pi}, Case{2, 48, 1.7}}) {
        Grid g(c.d, c.n, c.L);
        DyadicPartition part(g);
        INFO("d = " << c.d << ", N = " << c.n << ", L = " << c.L);
        REQUIRE(part.partition_residual() <= 1e-12);
    }
}

TEST_CASE("shell range covers the lattice with one spare shell each side") {
    Grid g(2, 64, 2.0 * pi);
    DyadicPartition part(g);
    REQUIRE(part.j_min() == -1); // k0 = 1: floor(log2 1) - 1
    REQUIRE(part.j_max() == 7);  // xi_max = 32 sqrt 2: ceil(log2 45.25) + 1
    REQUIRE(part.shells() == part.j_max() - part.j_min() + 1);
    // the spare edge shells carry no lattice weight on this grid: radii
    // run from 1 to 45.25, outside (1/4, 1) and (64, 256)
    double lo = 0.0, hi = 0.0;
    for (double w : part.shell(part.j_min())) lo = std::max(lo, w);
    for (double w : part.shell(part.j_max())) hi = std::max(hi, w);
    REQUIRE(lo == 0.0);
    REQUIRE(hi == 0.0);
}

TEST_CASE("shell tables vanish outside the dyadic annulus") {
    Grid g(2, 32, 2.0 * pi);
    DyadicPartition part(g);
    for (int j = part.j_min(); j <= part.j_max(); ++j) {
        const std::vector<double>& t = part.shell(j);
        double lo = std::ldexp(1.0, j - 1), hi = std::ldexp(1.0, j + 1);
        for (std::size_t i = 1; i < g.size(); ++i) {
            double r = g.xi_norm(i);
            if (r <= lo || r >= hi) REQUIRE(t[i] == 0.0);
        }
    }
    REQUIRE_THROWS_AS(part.shell(part.j_max() + 1), std::out_of_range);
}

TEST_CASE("blocks resum to the mean-free part of the field") {
    SpectrumShape shape;
    shape.exponent = -0.5;
    shape.cutoff = 20.0;
    for (int d : {2, 3}) {
        Grid g(d, d == 2 ? 64 : 16, 2.0 * pi);
        DyadicPartition part(g);
        ScalarField f = random_scalar(g, 17, tags::sweep_a, shape);
        f.at(0, 0) = complexd{3.0, 0.0}; // a mean the blocks must drop
        ScalarField sum(g);
        for (int j = part.j_min(); j <= part.j_max(); ++j) sum.axpy(1.0, block(f, j, part));
        double worst = 0.0;
        for (std::size_t i = 1; i < g.size(); ++i)
            worst = std::max(worst, std::abs(sum.at(0, i) - f.at(0, i)));
        REQUIRE(worst <= 1e-12 * f.coeff_norm());
        REQUIRE(std::abs(sum.at(0, 0)) == 0.0);
    }
}

TEST_CASE("out-of-range blocks are zero fields") {
    Grid g(2, 16, 2.0 * pi);
    DyadicPartition part(g);
    SpectrumShape shape;
    ScalarField f = random_scalar(g, 9, tags::sweep_b, shape);
    REQUIRE(block(f, part.j_min() - 3, part).coeff_norm() == 0.0);
    REQUIRE(block(f, part.j_max() + 3, part).coeff_norm() == 0.0);
}

TEST_CASE("sobolev norm equals the lambda_power L2 route") {
    Grid g(2, 32, 2.0 * pi);
    SpectrumShape shape;
    shape.exponent = -1.0;
    ScalarField f = random_scalar(g, 23, tags::sweep_a, shape);
    for (double s : {0.0, 0.5, 1.0, 2.5}) {
        double direct = sobolev_norm(f, s);
        double routed = spectral_l2(lambda_power(f, s));
        REQUIRE(direct == Catch::Approx(routed).epsilon(1e-12));
    }
    // negative order needs a mean-free field (this one is), and matches too
    REQUIRE(sobolev_norm(f, -0.5)
            == Catch::Approx(spectral_l2(lambda_power(f, -0.5))).epsilon(1e-12));
}

TEST_CASE("besov p=2 shortcut agrees with explicit block synthesis") {
    Grid g(2, 32, 2.0 * pi);
    DyadicPartition part(g);
    SpectrumShape shape;
    shape.exponent = -0.7;
    shape.cutoff = 9.0;
    VectorField u = random_solenoidal(g, 29, tags::sweep_a, shape);
    for (double s : {0.0, 1.0, -0.5})
        for (double r : {1.0, 2.0}) {
            double direct = besov_norm(u, s, 2.0, r, part);
            double manual = 0.0;
            for (int j = part.j_min(); j <= part.j_max(); ++j) {
                double term = std::pow(2.0, s * j) * lp_norm(block(u, j, part), 2.0);
                manual += std::pow(term, r);
            }
            manual = std::pow(manual, 1.0 / r);
            REQUIRE(direct == Catch::Approx(manual).epsilon(1e-10));
        }
}

TEST_CASE("besov 2,2 is equivalent to the sobolev norm with dyadic constants") {
    Grid g(3, 16, 2.0 * pi);
    DyadicPartition part(g);
    SpectrumShape shape;
    shape.exponent = -0.5;
    shape.cutoff = 6.0;
    ScalarField f = random_scalar(g, 31, tags::sweep_c, shape);
    for (double s : {0.5, 1.0, 2.0}) {
        double ratio = besov_norm(f, s, 2.0, 2.0, part) / sobolev_norm(f, s);
        double slack = std::pow(2.0, std::abs(s)) * std::sqrt(2.0);
        REQUIRE(ratio <= slack);
        REQUIRE(ratio >= 1.0 / slack);
    }
}

TEST_CASE("besov norm ordering in the summability index") {
    // l^1 over shells dominates l^2 dominates l^inf
    Grid g(2, 32, 2.0 * pi);
    DyadicPartition part(g);
    SpectrumShape shape;
    shape.exponent = -1.0;
    shape.cutoff = 10.0;
    ScalarField f = random_scalar(g, 37, tags::sweep_a, shape);
    double b1 = besov_norm(f, 1.0, 2.0, 1.0, part);
    double b2 = besov_norm(f, 1.0, 2.0, 2.0, part);
    double binf = besov_norm(f, 1.0, 2.0,
                             std::numeric_limits<double>::infinity(), part);
    REQUIRE(b1 >= b2);
    REQUIRE(b2 >= binf);
    REQUIRE(binf > 0.0);
}

TEST_CASE("nonpositive besov order demands a mean-free field") {
    Grid g(2, 16, 2.0 * pi);
    DyadicPartition part(g);
    ScalarField f(g);
    f.at(0, 0) = complexd{1.0, 0.0};
    std::size_t i = g.index_of_wave({1, 0, 0});
    f.at(0, i) = complexd{0.5, 0.0};
    f.at(0, g.conjugate_index(i)) = complexd{0.5, 0.0};
    REQUIRE_THROWS_AS(besov_norm(f, -0.5, 2.0, 1.0, part), std::domain_error);
    REQUIRE_THROWS_AS(sobolev_norm(f, -0.5), std::domain_error);
    REQUIRE_NOTHROW(besov_norm(f, 0.5, 2.0, 1.0, part));
    zero_mean(f);
    REQUIRE_NOTHROW(besov_norm(f, -0.5, 2.0, 1.0, part));
}

TEST_CASE("grid mismatch between field and partition throws") {
    Grid a(2, 16, 2.0 * pi), b(2, 32, 2.0 * pi);
    DyadicPartition part(a);
    ScalarField f(b);
    REQUIRE_THROWS_AS(block(f, 0, part), std::invalid_argument);
    REQUIRE_THROWS_AS(besov_norm(f, 1.0, 2.0, 1.0, part), std::invalid_argument);
}
