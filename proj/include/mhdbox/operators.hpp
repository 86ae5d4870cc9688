#pragma once

#include "mhdbox/field.hpp"

namespace mhdbox {

// Spectral partial derivative: c(k) -> i k_axis c(k). axis is 1, 2 or 3.
// The k = -N/2 plane of the derivative axis has no conjugate partner and is
// zeroed to keep the result a real field.
inline SpectralField derivative(const SpectralField& f, int axis) {
    const Grid& g = f.grid;
    SpectralField out(g);
    const int nyquist = -g.n / 2;
    for_each_mode(g, [&](std::size_t idx, int k1, int k2, int k3) {
        const int ka = axis == 1 ? k1 : axis == 2 ? k2 : k3;
        if (ka == nyquist) {
            out.c[idx] = Complex{0.0, 0.0};
            return;
        }
        const Complex v = f.c[idx];
        out.c[idx] = Complex{-static_cast<double>(ka) * v.imag(), static_cast<double>(ka) * v.real()};
    });
    return out;
}

inline VectorField gradient(const SpectralField& f) {
    VectorField out(f.grid);
    for (int axis = 1; axis <= 3; ++axis) out[axis - 1] = derivative(f, axis);
    return out;
}

inline SpectralField divergence(const VectorField& v) {
    SpectralField out = derivative(v[0], 1);
    out += derivative(v[1], 2);
    out += derivative(v[2], 3);
    return out;
}

// Leray projection: w(k) -> w(k) - k (k.w)/|k|^2 for k != 0, k = 0 untouched.
// Removes the gradient part, so the output is divergence-free; idempotent.
inline void leray_project_in_place(VectorField& w) {
    const Grid& g = w.grid();
    for_each_mode(g, [&](std::size_t idx, int k1, int k2, int k3) {
        const double ksq = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                           static_cast<double>(k3) * k3;
        if (ksq == 0.0) return;
        const Complex dot = static_cast<double>(k1) * w[0].c[idx] +
                            static_cast<double>(k2) * w[1].c[idx] +
                            static_cast<double>(k3) * w[2].c[idx];
        const Complex q = dot / ksq;
        w[0].c[idx] -= static_cast<double>(k1) * q;
        w[1].c[idx] -= static_cast<double>(k2) * q;
        w[2].c[idx] -= static_cast<double>(k3) * q;
    });
}

inline VectorField leray_project(const VectorField& w) {
    VectorField out = w;
    leray_project_in_place(out);
    return out;
}

inline void zero_mean(SpectralField& f) { f.c[0] = Complex{0.0, 0.0}; }
inline void zero_mean(VectorField& v) {
    for (int i = 0; i < 3; ++i) zero_mean(v[i]);
}

// Zero every mode with any |k_i| > limit (2/3-rule dealiasing uses
// limit = N/3, which also wipes the Nyquist planes).
inline void truncate_modes(SpectralField& f, int limit) {
    for_each_mode(f.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        if (std::abs(k1) > limit || std::abs(k2) > limit || std::abs(k3) > limit)
            f.c[idx] = Complex{0.0, 0.0};
    });
}

inline void zero_nyquist(SpectralField& f) {
    const Grid& g = f.grid;
    const int nyq = -g.n / 2;
    for_each_mode(g, [&](std::size_t idx, int k1, int k2, int k3) {
        if (k1 == nyq || k2 == nyq || k3 == nyq) f.c[idx] = Complex{0.0, 0.0};
    });
}

} // namespace mhdbox
