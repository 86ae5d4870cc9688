#pragma once

#include <cmath>

#include "mhdbox/field.hpp"
#include "mhdbox/operators.hpp"

namespace mhdbox {

// H^k with unit multi-index weights: ||f||^2_{H^k} = sum_{|a|<=k} ||d^a f||^2_{L2}.
// Under this convention the anisotropic Poincare constant is exactly 1
// termwise in spectral space, which the checks below rely on.
struct SobolevOrder {
    int k = 0;
    explicit SobolevOrder(int order) : k(order) {
        if (k < 0 || k > 40) throw ValidationError("sobolev order", "must be in [0, 40]");
    }
};

namespace detail {

inline constexpr int max_sobolev_order = 40;

// sum_{|a|<=order} k1^{2a1} k2^{2a2} k3^{2a3}
// = sum_{m<=order} h_m(k1^2,k2^2,k3^2) with h_m the complete homogeneous
// symmetric polynomial, built by the usual add-one-variable recurrence.
inline double sobolev_multiplier(int order, int k1, int k2, int k3) {
    const double a = static_cast<double>(k1) * k1;
    const double b = static_cast<double>(k2) * k2;
    const double c = static_cast<double>(k3) * k3;
    double h1[max_sobolev_order + 1], h2[max_sobolev_order + 1];
    h1[0] = 1.0;
    for (int m = 1; m <= order; ++m) h1[m] = h1[m - 1] * a;
    for (int m = 0; m <= order; ++m) {
        double s = 0.0, bp = 1.0;
        for (int i = 0; i <= m; ++i, bp *= b) s += bp * h1[m - i];
        h2[m] = s;
    }
    double total = 0.0;
    for (int m = 0; m <= order; ++m) {
        double s = 0.0, cp = 1.0;
        for (int i = 0; i <= m; ++i, cp *= c) s += cp * h2[m - i];
        total += s;
    }
    return total;
}

} // namespace detail

inline double sobolev_norm_sq(const SpectralField& f, SobolevOrder order) {
    double sum = 0.0;
    for_each_mode(f.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        sum += detail::sobolev_multiplier(order.k, k1, k2, k3) * std::norm(f.c[idx]);
    });
    return Grid::volume() * sum;
}

inline double sobolev_norm_sq(const VectorField& v, SobolevOrder order) {
    return sobolev_norm_sq(v[0], order) + sobolev_norm_sq(v[1], order) + sobolev_norm_sq(v[2], order);
}

template <class FieldT>
inline double sobolev_norm(const FieldT& f, SobolevOrder order) {
    return std::sqrt(sobolev_norm_sq(f, order));
}

// ||d3 f||_{H^k}: same mode sums with an extra k3^2, no transform needed.
inline double anisotropic_norm_sq(const SpectralField& f, SobolevOrder order) {
    double sum = 0.0;
    for_each_mode(f.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double k3sq = static_cast<double>(k3) * k3;
        sum += k3sq * detail::sobolev_multiplier(order.k, k1, k2, k3) * std::norm(f.c[idx]);
    });
    return Grid::volume() * sum;
}

inline double anisotropic_norm_sq(const VectorField& v, SobolevOrder order) {
    return anisotropic_norm_sq(v[0], order) + anisotropic_norm_sq(v[1], order) +
           anisotropic_norm_sq(v[2], order);
}

template <class FieldT>
inline double anisotropic_norm(const FieldT& f, SobolevOrder order) {
    return std::sqrt(anisotropic_norm_sq(f, order));
}

inline double l2_norm_sq(const SpectralField& f) {
    double sum = 0.0;
    for (const auto& v : f.c) sum += std::norm(v);
    return Grid::volume() * sum;
}

inline double l2_norm_sq(const VectorField& v) {
    return l2_norm_sq(v[0]) + l2_norm_sq(v[1]) + l2_norm_sq(v[2]);
}

template <class FieldT>
inline double l2_norm(const FieldT& f) {
    return std::sqrt(l2_norm_sq(f));
}

// integral of f g over T^3 for real fields, evaluated by Parseval.
inline double inner_l2(const SpectralField& f, const SpectralField& g) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f.c.size(); ++i)
        sum += f.c[i].real() * g.c[i].real() + f.c[i].imag() * g.c[i].imag();
    return Grid::volume() * sum;
}

inline double inner_l2(const VectorField& f, const VectorField& g) {
    return inner_l2(f[0], g[0]) + inner_l2(f[1], g[1]) + inner_l2(f[2], g[2]);
}

// ||grad f||^2_{L2} = sum_k |k|^2 |c|^2 (2pi)^3; Nyquist planes excluded as in
// derivative().
inline double gradient_norm_sq(const SpectralField& f) {
    const int nyq = -f.grid.n / 2;
    double sum = 0.0;
    for_each_mode(f.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double a = (k1 == nyq) ? 0.0 : static_cast<double>(k1) * k1;
        const double b = (k2 == nyq) ? 0.0 : static_cast<double>(k2) * k2;
        const double c = (k3 == nyq) ? 0.0 : static_cast<double>(k3) * k3;
        sum += (a + b + c) * std::norm(f.c[idx]);
    });
    return Grid::volume() * sum;
}

inline double gradient_norm_sq(const VectorField& v) {
    return gradient_norm_sq(v[0]) + gradient_norm_sq(v[1]) + gradient_norm_sq(v[2]);
}

// ||grad f||^2_{H^k} = sum_i ||d_i f||^2_{H^k}, i.e. the full-gradient norm.
inline double gradient_sobolev_norm_sq(const SpectralField& f, SobolevOrder order) {
    const int nyq = -f.grid.n / 2;
    double sum = 0.0;
    for_each_mode(f.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double a = (k1 == nyq) ? 0.0 : static_cast<double>(k1) * k1;
        const double b = (k2 == nyq) ? 0.0 : static_cast<double>(k2) * k2;
        const double c = (k3 == nyq) ? 0.0 : static_cast<double>(k3) * k3;
        sum += (a + b + c) * detail::sobolev_multiplier(order.k, k1, k2, k3) * std::norm(f.c[idx]);
    });
    return Grid::volume() * sum;
}

inline double gradient_sobolev_norm_sq(const VectorField& v, SobolevOrder order) {
    return gradient_sobolev_norm_sq(v[0], order) + gradient_sobolev_norm_sq(v[1], order) +
           gradient_sobolev_norm_sq(v[2], order);
}

struct PoincareResult {
    double lhs = 0.0; // ||f||_{H^k}
    double rhs = 0.0; // ||d3 f||_{H^k}
    double ratio = 0.0;
};

// Anisotropic Poincare check. Hypothesis: zero x3-average on every vertical
// line, i.e. the k3 = 0 plane vanishes (to 1e-12 relative). On the 2pi-periodic
// lattice min |k3| >= 1 then gives ||f||_{H^k} <= ||d3 f||_{H^k} with constant 1.
inline PoincareResult poincare_check(const SpectralField& f, SobolevOrder order) {
    const double fnorm = l2_norm(f);
    double plane_sq = 0.0;
    for (int i1 = 0; i1 < f.grid.n; ++i1)
        for (int i2 = 0; i2 < f.grid.n; ++i2) plane_sq += std::norm(f.at_index(i1, i2, 0));
    const double plane = std::sqrt(Grid::volume() * plane_sq);
    if (fnorm > 0.0 && plane > 1e-12 * fnorm)
        throw PreconditionViolated("poincare_check: slice mean is not zero");

    PoincareResult r;
    r.lhs = sobolev_norm(f, order);
    r.rhs = anisotropic_norm(f, order);
    r.ratio = (r.rhs > 0.0) ? r.lhs / r.rhs : 0.0;
    return r;
}

// L2 norm of the wrong-parity projection over the field's L2 norm; 0 for the
// zero field.
inline double parity_residual(const VectorField& v, FieldRole role) {
    double bad_sq = 0.0, total_sq = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Parity wrong =
            component_parity(role, i) == Parity::Even ? Parity::Odd : Parity::Even;
        bad_sq += l2_norm_sq(parity_project(v[i], wrong));
        total_sq += l2_norm_sq(v[i]);
    }
    return total_sq > 0.0 ? std::sqrt(bad_sq / total_sq) : 0.0;
}

// ||div v||_{L2} / ||v||_{H1}; 0 for the zero field.
inline double divergence_residual(const VectorField& v) {
    const double denom = sobolev_norm(v, SobolevOrder{1});
    if (denom == 0.0) return 0.0;
    return l2_norm(divergence(v)) / denom;
}

} // namespace mhdbox
