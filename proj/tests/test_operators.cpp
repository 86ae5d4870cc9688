#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace mhdbox;
using namespace mhdbox::testing;

TEST_CASE("d3 sin(x3) = cos(x3)", "[operators]") {
    const Grid grid(16);
    const SpectralField f = sine_field(grid, 0, 0, 1, 1.0);
    const SpectralField df = derivative(f, 3);
    CHECK(max_diff(df, cosine_field(grid, 0, 0, 1, 1.0)) < 1e-15);
}

TEST_CASE("derivative of a constant vanishes", "[operators]") {
    const Grid grid(8);
    SpectralField f(grid);
    f.c[0] = Complex{3.7, 0.0};
    CHECK(derivative(f, 1).max_abs() == 0.0);
}

TEST_CASE("d2 multiplies the e^{i2x2} mode by 2i", "[operators]") {
    const Grid grid(16);
    SpectralField f(grid);
    f.at_wave(0, 2, 0) = Complex{1.0, 0.0};
    const SpectralField df = derivative(f, 2);
    CHECK(std::abs(df.at_wave(0, 2, 0) - Complex{0.0, 2.0}) < 1e-15);
}

TEST_CASE("derivative zeroes the Nyquist plane of its axis", "[operators]") {
    const Grid grid(8);
    SpectralField f(grid);
    f.at_wave(-4, 1, 0) = Complex{1.0, 1.0};
    CHECK(derivative(f, 1).max_abs() == 0.0);
    CHECK(std::abs(derivative(f, 2).at_wave(-4, 1, 0)) > 0.0);
}

TEST_CASE("derivatives commute across axes to round-off", "[operators]") {
    const Grid grid(16);
    const SpectralField f = random_field(grid, 5, 6);
    for (int a = 1; a <= 3; ++a)
        for (int b = a + 1; b <= 3; ++b) {
            const SpectralField ab = derivative(derivative(f, a), b);
            const SpectralField ba = derivative(derivative(f, b), a);
            CHECK(max_diff(ab, ba) <= 1e-13 * std::max(ab.max_abs(), 1e-30));
        }
}

TEST_CASE("leray projection kills gradients of zero-mean scalars", "[operators]") {
    const Grid grid(16);
    SpectralField phi = random_field(grid, 9, 5);
    zero_mean(phi);
    const VectorField g = gradient(phi);
    const VectorField pg = leray_project(g);
    CHECK(pg.max_abs() <= 1e-13 * std::max(g.max_abs(), 1e-30));
}

TEST_CASE("leray projection keeps divergence-free fields unchanged", "[operators]") {
    const Grid grid(16);
    const VectorField w = leray_project(random_vector_field(grid, 21, 5));
    const VectorField pw = leray_project(w);
    CHECK(max_diff(pw, w) <= 1e-14 * std::max(w.max_abs(), 1e-30));
}

TEST_CASE("leray projection is idempotent on random fields", "[operators]") {
    const Grid grid(16);
    for (std::uint64_t seed : {31, 32, 33}) {
        const VectorField w = random_vector_field(grid, seed, 5);
        const VectorField pw = leray_project(w);
        const VectorField ppw = leray_project(pw);
        CHECK(max_diff(ppw, pw) < 1e-13 * std::max(1.0, w.max_abs()));
    }
}

TEST_CASE("projected fields are divergence-free in L2", "[operators]") {
    const Grid grid(16);
    for (std::uint64_t seed : {41, 42, 43, 44, 45}) {
        const VectorField w = random_vector_field(grid, seed, 5);
        const double div = l2_norm(divergence(leray_project(w)));
        CHECK(div <= 1e-12 * sobolev_norm(w, SobolevOrder{1}));
    }
}

TEST_CASE("two-thirds truncation wipes the upper shell", "[operators]") {
    const Grid grid(12); // limit N/3 = 4
    SpectralField f = random_field(grid, 50, 5);
    truncate_modes(f, grid.dealias_limit());
    double outside = 0.0, inside = 0.0;
    for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const int m = std::max({std::abs(k1), std::abs(k2), std::abs(k3)});
        (m > 4 ? outside : inside) += std::abs(f.c[idx]);
    });
    CHECK(outside == 0.0);
    CHECK(inside > 0.0);
}
