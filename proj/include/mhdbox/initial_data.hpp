#pragma once

#include <cstdint>
#include <random>

#include "mhdbox/dynamics.hpp"
#include "mhdbox/norms.hpp"

namespace mhdbox {

enum class SpectrumShape { LowModes, PowerLaw };

// Random small data satisfying every structural hypothesis at once:
// symmetry class, zero means, divergence-free, and the smallness norm
// ||u0||_{H^{2s+1}} + ||grad b0||_{H^{2s}} calibrated to epsilon exactly by a
// single global rescale of the draft.
struct InitSpec {
    std::uint64_t seed = 1;
    double epsilon = 0.0;
    int s = 5; // >= 5 in the global-regularity regime; lower allowed for exploration
    SpectrumShape spectrum = SpectrumShape::LowModes;
    int k_max = 2;
    double exponent = 2.0;                        // PowerLaw envelope |k|^-exponent
    static constexpr double alpha = Grid::volume(); // mean of the full B3

    void validate(const Grid& grid) const {
        if (epsilon < 0.0) throw ValidationError("init.epsilon", "must be >= 0");
        if (s < 2) throw ValidationError("init.s", "must be >= 2");
        if (k_max < 1) throw ValidationError("init.k_max", "must be >= 1");
        if (k_max > grid.dealias_limit())
            throw ValidationError("init.k_max", "must be <= N/3 (inside the dealiased shell)");
        if (spectrum == SpectrumShape::PowerLaw && exponent < 0.0)
            throw ValidationError("init.exponent", "must be >= 0");
    }
};

namespace detail {

// Complex Gaussian draft on 0 < max|k_i| <= k_max with the chosen envelope,
// drawn in storage order for reproducibility.
inline void draw_component(SpectralField& f, const InitSpec& spec, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for_each_mode(f.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const int kmax_axis = std::max({std::abs(k1), std::abs(k2), std::abs(k3)});
        if (kmax_axis == 0 || kmax_axis > spec.k_max) return;
        double env = 1.0;
        if (spec.spectrum == SpectrumShape::PowerLaw) {
            const double kk = std::sqrt(static_cast<double>(k1) * k1 +
                                        static_cast<double>(k2) * k2 +
                                        static_cast<double>(k3) * k3);
            env = std::pow(kk, -spec.exponent);
        }
        f.c[idx] = env * Complex{gauss(rng), gauss(rng)};
    });
}

} // namespace detail

inline MhdState generate(const InitSpec& spec, const Grid& grid) {
    spec.validate(grid);
    MhdState state(grid);
    if (spec.epsilon == 0.0) return state;

    const SobolevOrder u_order{2 * spec.s + 1};
    const SobolevOrder b_order{2 * spec.s};

    for (std::uint64_t attempt = 0; attempt < 8; ++attempt) {
        std::mt19937_64 rng(spec.seed + attempt * 0x9e3779b97f4a7c15ULL);
        for (int i = 0; i < 3; ++i) detail::draw_component(state.u[i], spec, rng);
        for (int i = 0; i < 3; ++i) detail::draw_component(state.b[i], spec, rng);

        for (int i = 0; i < 3; ++i) {
            hermitian_symmetrize(state.u[i]);
            hermitian_symmetrize(state.b[i]);
        }
        parity_symmetrize(state.u, FieldRole::Velocity);
        parity_symmetrize(state.b, FieldRole::Magnetic);
        zero_mean(state.u);
        zero_mean(state.b);
        for (int i = 0; i < 3; ++i) {
            zero_nyquist(state.u[i]);
            zero_nyquist(state.b[i]);
        }
        // The projector commutes with the x3 reflection, so the class survives.
        leray_project_in_place(state.u);
        leray_project_in_place(state.b);
        if (parity_residual(state.u, FieldRole::Velocity) != 0.0 ||
            parity_residual(state.b, FieldRole::Magnetic) != 0.0)
            throw Error("initial data: parity class broken by projection");

        const double draft = sobolev_norm(state.u, u_order) +
                             std::sqrt(gradient_sobolev_norm_sq(state.b, b_order));
        if (draft > 0.0) {
            const double scale = spec.epsilon / draft;
            state.u *= scale;
            state.b *= scale;
            return state;
        }
        state.u.set_zero();
        state.b.set_zero();
    }
    throw DegenerateDraft("initial data draft has zero norm after 8 substreams");
}

// B = b + e3: adds 1 to the k = 0 mode of the vertical component, so the
// full field carries mean alpha = (2pi)^3 in component 3.
inline VectorField full_field(const MhdState& state) {
    VectorField B = state.b;
    B[2].c[0] += Complex{1.0, 0.0};
    return B;
}

} // namespace mhdbox
