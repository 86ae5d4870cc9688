#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "mhdbox/grid.hpp"

namespace mhdbox {

using Complex = std::complex<double>;

// One real scalar field on T^3 as truncated Fourier coefficients,
// f(x) = sum_k c(k) e^{i k.x}. Realness means c(-k) = conj(c(k)).
struct SpectralField {
    Grid grid;
    std::vector<Complex> c;

    SpectralField() = default;
    explicit SpectralField(const Grid& g) : grid(g), c(g.size()) {}

    Complex& operator[](std::size_t i) { return c[i]; }
    const Complex& operator[](std::size_t i) const { return c[i]; }

    Complex& at_index(int i1, int i2, int i3) { return c[grid.flat(i1, i2, i3)]; }
    const Complex& at_index(int i1, int i2, int i3) const { return c[grid.flat(i1, i2, i3)]; }

    Complex& at_wave(int k1, int k2, int k3) {
        return c[grid.flat(grid.index_of(k1), grid.index_of(k2), grid.index_of(k3))];
    }
    const Complex& at_wave(int k1, int k2, int k3) const {
        return c[grid.flat(grid.index_of(k1), grid.index_of(k2), grid.index_of(k3))];
    }

    SpectralField& operator+=(const SpectralField& o) {
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
        return *this;
    }
    SpectralField& operator*=(double a) {
        for (auto& v : c) v *= a;
        return *this;
    }

    void set_zero() { std::fill(c.begin(), c.end(), Complex{0.0, 0.0}); }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : c) m = std::max(m, std::abs(v));
        return m;
    }
};

inline SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
inline SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
inline SpectralField operator*(double s, SpectralField a) { return a *= s; }

// y += a*x
inline void axpy(double a, const SpectralField& x, SpectralField& y) {
    for (std::size_t i = 0; i < y.c.size(); ++i) y.c[i] += a * x.c[i];
}

// Three scalar components on one shared grid; component 0,1 horizontal,
// component 2 vertical (x3).
struct VectorField {
    std::array<SpectralField, 3> comp;

    VectorField() = default;
    explicit VectorField(const Grid& g) : comp{SpectralField(g), SpectralField(g), SpectralField(g)} {}

    const Grid& grid() const { return comp[0].grid; }

    SpectralField& operator[](int i) { return comp[i]; }
    const SpectralField& operator[](int i) const { return comp[i]; }

    VectorField& operator+=(const VectorField& o) {
        for (int i = 0; i < 3; ++i) comp[i] += o.comp[i];
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        for (int i = 0; i < 3; ++i) comp[i] -= o.comp[i];
        return *this;
    }
    VectorField& operator*=(double a) {
        for (int i = 0; i < 3; ++i) comp[i] *= a;
        return *this;
    }

    void set_zero() {
        for (auto& f : comp) f.set_zero();
    }

    double max_abs() const {
        return std::max({comp[0].max_abs(), comp[1].max_abs(), comp[2].max_abs()});
    }
};

inline void axpy(double a, const VectorField& x, VectorField& y) {
    for (int i = 0; i < 3; ++i) axpy(a, x.comp[i], y.comp[i]);
}

// 2D field on T^2 (the k3 = 0 coefficient plane).
struct PlaneField {
    int n = 0;
    std::vector<Complex> c;

    PlaneField() = default;
    explicit PlaneField(int n_) : n(n_), c(static_cast<std::size_t>(n_) * n_) {}

    Complex& at_index(int i1, int i2) { return c[static_cast<std::size_t>(i1) * n + i2]; }
    const Complex& at_index(int i1, int i2) const { return c[static_cast<std::size_t>(i1) * n + i2]; }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : c) m = std::max(m, std::abs(v));
        return m;
    }
};

// x3-average as a 2D field: spectrally just the k3 = 0 plane.
inline PlaneField slice_mean(const SpectralField& f) {
    PlaneField out(f.grid.n);
    for (int i1 = 0; i1 < f.grid.n; ++i1)
        for (int i2 = 0; i2 < f.grid.n; ++i2) out.at_index(i1, i2) = f.at_index(i1, i2, 0);
    return out;
}

// Project coefficients onto c(-k) = conj(c(k)); exact for already-real fields.
inline void hermitian_symmetrize(SpectralField& f) {
    const Grid& g = f.grid;
    SpectralField out(g);
    for (int i1 = 0; i1 < g.n; ++i1) {
        const int j1 = g.index_of(-g.wavenumber(i1));
        for (int i2 = 0; i2 < g.n; ++i2) {
            const int j2 = g.index_of(-g.wavenumber(i2));
            for (int i3 = 0; i3 < g.n; ++i3) {
                const int j3 = g.index_of(-g.wavenumber(i3));
                out.at_index(i1, i2, i3) =
                    0.5 * (f.at_index(i1, i2, i3) + std::conj(f.at_index(j1, j2, j3)));
            }
        }
    }
    f = std::move(out);
}

enum class Parity { Even, Odd };

// Projection onto the even/odd part in x3. In spectral space:
// even  <=>  c(kh, k3) =  c(kh, -k3),  odd  <=>  c(kh, k3) = -c(kh, -k3).
inline SpectralField parity_project(const SpectralField& f, Parity p) {
    const Grid& g = f.grid;
    SpectralField out(g);
    const double sign = (p == Parity::Even) ? 1.0 : -1.0;
    for (int i1 = 0; i1 < g.n; ++i1)
        for (int i2 = 0; i2 < g.n; ++i2)
            for (int i3 = 0; i3 < g.n; ++i3) {
                const int j3 = g.index_of(-g.wavenumber(i3));
                out.at_index(i1, i2, i3) =
                    0.5 * (f.at_index(i1, i2, i3) + sign * f.at_index(i1, i2, j3));
            }
    return out;
}

inline std::pair<SpectralField, SpectralField> parity_decompose(const SpectralField& f) {
    return {parity_project(f, Parity::Even), parity_project(f, Parity::Odd)};
}

// Symmetry class of eq-style MHD data: u has (h even, x3 odd),
// b has (h odd, x3 even).
enum class FieldRole { Velocity, Magnetic };

inline Parity component_parity(FieldRole role, int component) {
    const bool horizontal = component < 2;
    if (role == FieldRole::Velocity) return horizontal ? Parity::Even : Parity::Odd;
    return horizontal ? Parity::Odd : Parity::Even;
}

inline void parity_symmetrize(VectorField& v, FieldRole role) {
    for (int i = 0; i < 3; ++i) v[i] = parity_project(v[i], component_parity(role, i));
}

} // namespace mhdbox
