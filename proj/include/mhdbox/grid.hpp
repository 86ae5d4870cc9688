#pragma once

#include <cstddef>
#include <numbers>

#include "mhdbox/errors.hpp"

namespace mhdbox {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Uniform collocation grid on the periodic box [-pi,pi)^3 with N points per
// axis. Spectral storage is the full complex cube in FFT index order: index
// i in [0,N) carries wavenumber k = i for i < N/2 and k = i - N otherwise,
// so k ranges over {-N/2, ..., N/2-1}. The k = -N/2 plane (the unmatched
// Nyquist mode) has no conjugate partner; derivatives zero it.
struct Grid {
    int n = 0;

    Grid() = default;
    explicit Grid(int points_per_axis) : n(points_per_axis) {
        if (n < 8 || n % 2 != 0)
            throw ValidationError("grid.n", "must be even and >= 8");
    }

    std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }

    int wavenumber(int index) const { return index < n / 2 ? index : index - n; }
    int index_of(int k) const { return k >= 0 ? k : k + n; }

    std::size_t flat(int i1, int i2, int i3) const {
        return (static_cast<std::size_t>(i1) * n + i2) * n + i3;
    }

    // Physical sample point along one axis.
    double coordinate(int index) const { return -pi + two_pi * index / n; }

    double cell_volume() const {
        const double h = two_pi / n;
        return h * h * h;
    }
    static constexpr double volume() { return two_pi * two_pi * two_pi; }

    // Largest |k_i| kept by the 2/3 rule: any |k_i| > N/3 is zeroed.
    int dealias_limit() const { return n / 3; }

    bool operator==(const Grid&) const = default;
};

// Visit every mode in storage order; f(flat_index, k1, k2, k3).
template <class F>
inline void for_each_mode(const Grid& g, F&& f) {
    std::size_t idx = 0;
    for (int i1 = 0; i1 < g.n; ++i1) {
        const int k1 = g.wavenumber(i1);
        for (int i2 = 0; i2 < g.n; ++i2) {
            const int k2 = g.wavenumber(i2);
            for (int i3 = 0; i3 < g.n; ++i3, ++idx) f(idx, k1, k2, g.wavenumber(i3));
        }
    }
}

} // namespace mhdbox
