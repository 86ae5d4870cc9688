#pragma once

#include <random>

#include "mhdbox/mhdbox.hpp"

namespace mhdbox::testing {

inline std::vector<double> random_real_values(const Grid& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> values(grid.size());
    for (auto& v : values) v = uni(rng);
    return values;
}

// Random real (Hermitian) field with modes confined to max|k_i| <= k_cap.
inline SpectralField random_field(const Grid& grid, std::uint64_t seed, int k_cap) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SpectralField f(grid);
    for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
        if (std::max({std::abs(k1), std::abs(k2), std::abs(k3)}) > k_cap) return;
        f.c[idx] = Complex{gauss(rng), gauss(rng)};
    });
    hermitian_symmetrize(f);
    zero_nyquist(f);
    return f;
}

inline SpectralField random_zero_slice_field(const Grid& grid, std::uint64_t seed, int k_cap) {
    SpectralField f = random_field(grid, seed, k_cap);
    for (int i1 = 0; i1 < grid.n; ++i1)
        for (int i2 = 0; i2 < grid.n; ++i2) f.at_index(i1, i2, 0) = Complex{0.0, 0.0};
    return f;
}

inline VectorField random_vector_field(const Grid& grid, std::uint64_t seed, int k_cap) {
    VectorField v(grid);
    for (int i = 0; i < 3; ++i) v[i] = random_field(grid, seed + 101 * (i + 1), k_cap);
    return v;
}

// f(x) = amp * cos(k.x) as a physical sample array.
inline std::vector<double> cosine_samples(const Grid& grid, int k1, int k2, int k3, double amp) {
    std::vector<double> values(grid.size());
    std::size_t idx = 0;
    for (int i1 = 0; i1 < grid.n; ++i1)
        for (int i2 = 0; i2 < grid.n; ++i2)
            for (int i3 = 0; i3 < grid.n; ++i3, ++idx)
                values[idx] = amp * std::cos(k1 * grid.coordinate(i1) + k2 * grid.coordinate(i2) +
                                             k3 * grid.coordinate(i3));
    return values;
}

// Single real mode amp*cos(k.x) written directly in coefficient space.
inline SpectralField cosine_field(const Grid& grid, int k1, int k2, int k3, double amp) {
    SpectralField f(grid);
    f.at_wave(k1, k2, k3) += Complex{amp / 2.0, 0.0};
    f.at_wave(-k1, -k2, -k3) += Complex{amp / 2.0, 0.0};
    return f;
}

// amp*sin(k.x) = amp*(e^{ik.x} - e^{-ik.x})/(2i)
inline SpectralField sine_field(const Grid& grid, int k1, int k2, int k3, double amp) {
    SpectralField f(grid);
    f.at_wave(k1, k2, k3) += Complex{0.0, -amp / 2.0};
    f.at_wave(-k1, -k2, -k3) += Complex{0.0, amp / 2.0};
    return f;
}

inline double max_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.c.size(); ++i) m = std::max(m, std::abs(a.c[i] - b.c[i]));
    return m;
}

inline double max_diff(const VectorField& a, const VectorField& b) {
    return std::max({max_diff(a[0], b[0]), max_diff(a[1], b[1]), max_diff(a[2], b[2])});
}

} // namespace mhdbox::testing
