#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mhdbox/norms.hpp"
#include "mhdbox/transform.hpp"

namespace mhdbox {

enum class DealiasRule { TwoThirds, None };

struct DynamicsConfig {
    double nu = 1.0;      // fluid viscosity; the magnetic field has none
    double dt = 2e-3;
    DealiasRule dealias = DealiasRule::TwoThirds;
    bool exp_filter = false;     // exploratory high-k smoother, off by default
    bool enforce_parity = false; // re-symmetrize each step (off: parity is a theorem, not a constraint)
    bool nonlinear_terms = true; // quadratic transport/stretching terms
    bool coupling_terms = true;  // the d3 background-field coupling
    double cfl_limit = 0.5;
};

// Velocity u and magnetic perturbation b (full field B = b + e3), both
// divergence-free with zero mean. `dissipated` accumulates nu * int ||grad u||^2
// with the integrator's own quadrature, so the discrete energy balance
//   1/2(||u||^2+||b||^2)(t) - 1/2(...)(0) + dissipated(t) ~ 0
// can be checked at scheme accuracy.
struct MhdState {
    VectorField u;
    VectorField b;
    double time = 0.0;
    double dissipated = 0.0;

    MhdState() = default;
    explicit MhdState(const Grid& g) : u(g), b(g) {}

    const Grid& grid() const { return u.grid(); }

    double energy() const { return 0.5 * (l2_norm_sq(u) + l2_norm_sq(b)); }
};

struct MhdRhs {
    VectorField du;
    VectorField db;

    MhdRhs() = default;
    explicit MhdRhs(const Grid& g) : du(g), db(g) {}
};

// Pseudo-spectral evaluation of the coupled system
//   u_t + u.grad u - nu Lap u + grad p = b.grad b + d3 b
//   b_t + u.grad b               = b.grad u + d3 u
// with pressure eliminated by Leray projection, and integrating-factor RK4
// time stepping: the viscous factor exp(-nu|k|^2 dt) is applied exactly per
// mode on u, everything else is explicit, and b gets no dissipation at all.
//
// The quadratic terms are evaluated in rotational form,
//   P(-u.grad u + b.grad b) = P(-(curl u) x u + (curl b) x b),
//   -u.grad b + b.grad u    = curl(u x b),
// which is identical to the convective form through the projector once the
// 2/3 rule makes the products alias-free (the |u|^2/2-type gradients project
// to zero mode-wise, and div-free fields make the curl identity exact), but
// needs 18 transforms per evaluation instead of 30. Every physical-space
// product is dealiased right after it is formed. step() is a pure
// state-to-state map; the engine only holds plans, masks and scratch.
class Integrator {
public:
    Integrator(const Grid& grid, const DynamicsConfig& cfg)
        : grid_(grid), cfg_(cfg), fft_(grid.n) {
        if (cfg.nu <= 0.0) throw ValidationError("dynamics.nu", "must be positive");
        if (cfg.dt <= 0.0) throw ValidationError("dynamics.dt", "must be positive");
        build_tables();
        const std::size_t m = grid_.size();
        for (auto* v : {&pu_[0], &pu_[1], &pu_[2], &pb_[0], &pb_[1], &pb_[2]}) v->resize(m);
        for (auto* v : {&wu_[0], &wu_[1], &wu_[2], &wb_[0], &wb_[1], &wb_[2]}) v->resize(m);
        for (auto* v : {&prod_[0], &prod_[1], &prod_[2], &scratch_}) v->resize(m);
        stmp_ = SpectralField(grid_);
        uxb_ = VectorField(grid_);
        for (auto* f : {&f1_, &f2_, &f3_, &f4_}) *f = MhdRhs(grid_);
        for (auto* s : {&s2_, &s3_, &s4_}) *s = MhdState(grid_);
    }

    const DynamicsConfig& config() const { return cfg_; }
    const Grid& grid() const { return grid_; }

    // dt * max|k| * (max|u| + max|b| + 1); the +1 is the unit Alfven-type
    // speed of the background field e3. max|k| is the magnitude of the
    // largest retained wavevector.
    double cfl_number(const MhdState& state) {
        to_physical(state);
        return cfg_.dt * kmax_ * max_speed_physical();
    }

    double max_speed(const MhdState& state) {
        to_physical(state);
        return max_speed_physical();
    }

    // Non-stiff right-hand side (viscosity is the integrator's job):
    //   du = P(-u.grad u + b.grad b + d3 b)
    //   db = P(-u.grad b + b.grad u + d3 u)
    // db needs no projection analytically; projecting it anyway stops
    // round-off divergence drift. k = 0 modes are zeroed.
    MhdRhs rhs(const MhdState& state) {
        to_physical(state);
        if (cfg_.dt * kmax_ * max_speed_physical() > cfg_.cfl_limit)
            throw StepRejected("CFL violation at t = " + std::to_string(state.time));
        MhdRhs out(grid_);
        eval_rhs(state, out, true);
        return out;
    }

    MhdState step(const MhdState& state) {
        const double dt = cfg_.dt;
        const double h = dt / 2.0;

        // stage 1 (also the CFL gate for the step)
        to_physical(state);
        const double cfl = cfg_.dt * kmax_ * max_speed_physical();
        if (cfl > cfg_.cfl_limit)
            throw StepRejected("CFL number " + std::to_string(cfl) + " exceeds " +
                               std::to_string(cfg_.cfl_limit) + " at t = " +
                               std::to_string(state.time));
        eval_rhs(state, f1_, true);
        double diss = cfg_.nu * gradient_sq(state.u);

        const std::size_t m = grid_.size();
        const double* E = half_factor_.data();
        const double* E2 = full_factor_.data();

        // stage 2: u-argument E(u + h f1u), b-argument b + h f1b
        for (int i = 0; i < 3; ++i) {
            const Complex* u = state.u[i].c.data();
            const Complex* b = state.b[i].c.data();
            const Complex* fu = f1_.du[i].c.data();
            const Complex* fb = f1_.db[i].c.data();
            Complex* su = s2_.u[i].c.data();
            Complex* sb = s2_.b[i].c.data();
            for (std::size_t x = 0; x < m; ++x) {
                su[x] = E[x] * (u[x] + h * fu[x]);
                sb[x] = b[x] + h * fb[x];
            }
        }
        eval_rhs(s2_, f2_, false);
        diss += 2.0 * cfg_.nu * gradient_sq(s2_.u);

        // stage 3: u-argument E u + h f2u
        for (int i = 0; i < 3; ++i) {
            const Complex* u = state.u[i].c.data();
            const Complex* b = state.b[i].c.data();
            const Complex* fu = f2_.du[i].c.data();
            const Complex* fb = f2_.db[i].c.data();
            Complex* su = s3_.u[i].c.data();
            Complex* sb = s3_.b[i].c.data();
            for (std::size_t x = 0; x < m; ++x) {
                su[x] = E[x] * u[x] + h * fu[x];
                sb[x] = b[x] + h * fb[x];
            }
        }
        eval_rhs(s3_, f3_, false);
        diss += 2.0 * cfg_.nu * gradient_sq(s3_.u);

        // stage 4: u-argument E^2 u + dt E f3u
        for (int i = 0; i < 3; ++i) {
            const Complex* u = state.u[i].c.data();
            const Complex* b = state.b[i].c.data();
            const Complex* fu = f3_.du[i].c.data();
            const Complex* fb = f3_.db[i].c.data();
            Complex* su = s4_.u[i].c.data();
            Complex* sb = s4_.b[i].c.data();
            for (std::size_t x = 0; x < m; ++x) {
                su[x] = E2[x] * u[x] + dt * E[x] * fu[x];
                sb[x] = b[x] + dt * fb[x];
            }
        }
        eval_rhs(s4_, f4_, false);
        diss += cfg_.nu * gradient_sq(s4_.u);

        // u_{n+1} = E^2 u_n + dt/6 (E^2 f1 + 2E f2 + 2E f3 + f4)
        MhdState out = state;
        for (int i = 0; i < 3; ++i) {
            Complex* u = out.u[i].c.data();
            Complex* b = out.b[i].c.data();
            const Complex* g1 = f1_.du[i].c.data();
            const Complex* g2 = f2_.du[i].c.data();
            const Complex* g3 = f3_.du[i].c.data();
            const Complex* g4 = f4_.du[i].c.data();
            const Complex* e1 = f1_.db[i].c.data();
            const Complex* e2 = f2_.db[i].c.data();
            const Complex* e3 = f3_.db[i].c.data();
            const Complex* e4 = f4_.db[i].c.data();
            for (std::size_t x = 0; x < m; ++x) {
                u[x] = E2[x] * (u[x] + (dt / 6.0) * g1[x]) +
                       (dt / 3.0) * E[x] * (g2[x] + g3[x]) + (dt / 6.0) * g4[x];
                b[x] += (dt / 6.0) * (e1[x] + e4[x]) + (dt / 3.0) * (e2[x] + e3[x]);
            }
        }

        leray_fast(out.u);
        leray_fast(out.b);
        zero_mean(out.u);
        zero_mean(out.b);
        if (cfg_.enforce_parity) {
            parity_symmetrize(out.u, FieldRole::Velocity);
            parity_symmetrize(out.b, FieldRole::Magnetic);
        }
        if (cfg_.exp_filter) {
            for (int i = 0; i < 3; ++i) {
                apply_filter(out.u[i]);
                apply_filter(out.b[i]);
            }
        }

        out.time = state.time + dt;
        out.dissipated = state.dissipated + dt / 6.0 * diss;

        double sq = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (const auto& v : out.u[i].c) sq += std::norm(v);
            for (const auto& v : out.b[i].c) sq += std::norm(v);
        }
        if (!std::isfinite(sq))
            throw NonFinite("non-finite state at t = " + std::to_string(out.time));
        return out;
    }

    // Pressure recovered a posteriori from Lap p = div(-u.grad u + b.grad b + d3 b)
    // in the literal convective form (the rotational shortcut would fold the
    // |u|^2, |b|^2 gradients into p), zero mean. Never time-stepped.
    SpectralField recover_pressure(const MhdState& state) {
        VectorField forcing = momentum_forcing(state);
        SpectralField rhs_div = divergence(forcing);
        SpectralField p(grid_);
        for_each_mode(grid_, [&](std::size_t idx, int k1, int k2, int k3) {
            const double ksq = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                               static_cast<double>(k3) * k3;
            // -|k|^2 p = i k.G, and rhs_div already carries i k.G
            p.c[idx] = (ksq == 0.0) ? Complex{0.0, 0.0} : rhs_div.c[idx] / (-ksq);
        });
        return p;
    }

    // Unprojected convective momentum forcing -u.grad u + b.grad b + d3 b.
    VectorField momentum_forcing(const MhdState& state) {
        to_physical(state);
        VectorField adv(grid_);
        if (cfg_.nonlinear_terms) {
            for (int i = 0; i < 3; ++i) std::fill(prod_[i].begin(), prod_[i].end(), 0.0);
            const std::size_t m = grid_.size();
            for (int j = 1; j <= 3; ++j) {
                for (int i = 0; i < 3; ++i) {
                    derivative_into(state.u[i], j, stmp_);
                    fft_.inverse_into(stmp_, scratch_);
                    for (std::size_t x = 0; x < m; ++x) prod_[i][x] -= pu_[j - 1][x] * scratch_[x];
                    derivative_into(state.b[i], j, stmp_);
                    fft_.inverse_into(stmp_, scratch_);
                    for (std::size_t x = 0; x < m; ++x) prod_[i][x] += pb_[j - 1][x] * scratch_[x];
                }
            }
            for (int i = 0; i < 3; ++i) {
                fft_.forward_into(prod_[i], adv[i]);
                dealias(adv[i]);
            }
        }
        if (cfg_.coupling_terms)
            for (int i = 0; i < 3; ++i) {
                derivative_into(state.b[i], 3, stmp_);
                adv[i] += stmp_;
            }
        return adv;
    }

private:
    void build_tables() {
        const std::size_t m = grid_.size();
        half_factor_.assign(m, 1.0);
        full_factor_.assign(m, 1.0);
        filter_.assign(m, 1.0);
        dealias_mask_.assign(m, 1.0);
        ksq_.assign(m, 0.0);
        inv_ksq_.assign(m, 0.0);
        for (int a = 0; a < 3; ++a) {
            dk_[a].assign(m, 0.0);
            kd_[a].assign(m, 0.0);
        }
        const int limit = grid_.dealias_limit();
        const int nyq = -grid_.n / 2;
        const double kcut = grid_.n / 2.0;
        double kmax_sq = 0.0;
        for_each_mode(grid_, [&](std::size_t idx, int k1, int k2, int k3) {
            const double ksq = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                               static_cast<double>(k3) * k3;
            half_factor_[idx] = std::exp(-cfg_.nu * ksq * cfg_.dt / 2.0);
            full_factor_[idx] = half_factor_[idx] * half_factor_[idx];
            filter_[idx] = std::exp(-36.0 * std::pow(std::sqrt(ksq) / kcut, 36.0));
            inv_ksq_[idx] = (ksq == 0.0) ? 0.0 : 1.0 / ksq;
            kd_[0][idx] = k1;
            kd_[1][idx] = k2;
            kd_[2][idx] = k3;
            // derivative wavenumbers: the unmatched -N/2 plane differentiates to zero
            dk_[0][idx] = (k1 == nyq) ? 0.0 : k1;
            dk_[1][idx] = (k2 == nyq) ? 0.0 : k2;
            dk_[2][idx] = (k3 == nyq) ? 0.0 : k3;
            ksq_[idx] = dk_[0][idx] * dk_[0][idx] + dk_[1][idx] * dk_[1][idx] +
                        dk_[2][idx] * dk_[2][idx];
            const bool nyquist = (k1 == nyq || k2 == nyq || k3 == nyq);
            if (cfg_.dealias == DealiasRule::TwoThirds &&
                (std::abs(k1) > limit || std::abs(k2) > limit || std::abs(k3) > limit))
                dealias_mask_[idx] = 0.0;
            else if (!nyquist)
                kmax_sq = std::max(kmax_sq, ksq);
        });
        kmax_ = std::sqrt(kmax_sq);
    }

    // Internal Leray projection on precomputed tables (multiplication by the
    // cached 1/|k|^2; k = 0 row has inverse 0, and zero_mean() runs after).
    void leray_fast(VectorField& w) const {
        const std::size_t m = grid_.size();
        Complex* w0 = w[0].c.data();
        Complex* w1 = w[1].c.data();
        Complex* w2 = w[2].c.data();
        for (std::size_t idx = 0; idx < m; ++idx) {
            const double a = kd_[0][idx], b = kd_[1][idx], c = kd_[2][idx];
            const Complex q = (a * w0[idx] + b * w1[idx] + c * w2[idx]) * inv_ksq_[idx];
            w0[idx] -= a * q;
            w1[idx] -= b * q;
            w2[idx] -= c * q;
        }
    }

    void apply_filter(SpectralField& f) const {
        for (std::size_t idx = 0; idx < f.c.size(); ++idx) f.c[idx] *= filter_[idx];
    }

    void dealias(SpectralField& f) const {
        if (cfg_.dealias == DealiasRule::None) return;
        for (std::size_t idx = 0; idx < f.c.size(); ++idx) f.c[idx] *= dealias_mask_[idx];
    }

    double gradient_sq(const VectorField& v) const {
        double sum = 0.0;
        for (int i = 0; i < 3; ++i)
            for (std::size_t idx = 0; idx < v[i].c.size(); ++idx)
                sum += ksq_[idx] * std::norm(v[i].c[idx]);
        return Grid::volume() * sum;
    }

    // out(k) = i k_axis f(k), Nyquist plane of the axis zeroed.
    void derivative_into(const SpectralField& f, int axis, SpectralField& out) const {
        const double* dk = dk_[axis - 1].data();
        const std::size_t m = grid_.size();
        for (std::size_t idx = 0; idx < m; ++idx) {
            const Complex v = f.c[idx];
            out.c[idx] = Complex{-dk[idx] * v.imag(), dk[idx] * v.real()};
        }
    }

    // out(k) = (curl v)_comp = i (k_a v_b - k_b v_a), (a,b) the cyclic pair.
    void curl_component_into(const VectorField& v, int comp, SpectralField& out) const {
        const int a = (comp + 1) % 3, b = (comp + 2) % 3;
        const double* ka = dk_[a].data();
        const double* kb = dk_[b].data();
        const Complex* va = v[a].c.data();
        const Complex* vb = v[b].c.data();
        const std::size_t m = grid_.size();
        for (std::size_t idx = 0; idx < m; ++idx) {
            const Complex s = ka[idx] * vb[idx] - kb[idx] * va[idx];
            out.c[idx] = Complex{-s.imag(), s.real()};
        }
    }

    void to_physical(const MhdState& state) {
        for (int i = 0; i < 3; ++i) {
            fft_.inverse_into(state.u[i], pu_[i]);
            fft_.inverse_into(state.b[i], pb_[i]);
        }
    }

    double max_speed_physical() const {
        double umax = 0.0, bmax = 0.0;
        const std::size_t m = grid_.size();
        for (std::size_t x = 0; x < m; ++x) {
            umax = std::max(umax, pu_[0][x] * pu_[0][x] + pu_[1][x] * pu_[1][x] + pu_[2][x] * pu_[2][x]);
            bmax = std::max(bmax, pb_[0][x] * pb_[0][x] + pb_[1][x] * pb_[1][x] + pb_[2][x] * pb_[2][x]);
        }
        return std::sqrt(umax) + std::sqrt(bmax) + 1.0;
    }

    // physical_ready: stage 1 already ran to_physical() for the CFL gate.
    void eval_rhs(const MhdState& state, MhdRhs& out, bool physical_ready) {
        const std::size_t m = grid_.size();
        if (cfg_.nonlinear_terms) {
            if (!physical_ready) to_physical(state);
            for (int i = 0; i < 3; ++i) {
                curl_component_into(state.u, i, stmp_);
                fft_.inverse_into(stmp_, wu_[i]);
                curl_component_into(state.b, i, stmp_);
                fft_.inverse_into(stmp_, wb_[i]);
            }
            // momentum: -(curl u) x u + (curl b) x b
            for (int i = 0; i < 3; ++i) {
                const int a = (i + 1) % 3, b = (i + 2) % 3;
                for (std::size_t x = 0; x < m; ++x)
                    prod_[i][x] = -(wu_[a][x] * pu_[b][x] - wu_[b][x] * pu_[a][x]) +
                                  (wb_[a][x] * pb_[b][x] - wb_[b][x] * pb_[a][x]);
            }
            for (int i = 0; i < 3; ++i) {
                fft_.forward_into(prod_[i], out.du[i]);
                dealias(out.du[i]);
            }
            // induction: curl(u x b)
            for (int i = 0; i < 3; ++i) {
                const int a = (i + 1) % 3, b = (i + 2) % 3;
                for (std::size_t x = 0; x < m; ++x)
                    prod_[i][x] = pu_[a][x] * pb_[b][x] - pu_[b][x] * pb_[a][x];
            }
            for (int i = 0; i < 3; ++i) {
                fft_.forward_into(prod_[i], uxb_[i]);
                dealias(uxb_[i]);
            }
            for (int i = 0; i < 3; ++i) curl_component_into(uxb_, i, out.db[i]);
        } else {
            out.du[0].set_zero();
            out.du[1].set_zero();
            out.du[2].set_zero();
            out.db[0].set_zero();
            out.db[1].set_zero();
            out.db[2].set_zero();
        }
        if (cfg_.coupling_terms) {
            for (int i = 0; i < 3; ++i) {
                derivative_into(state.b[i], 3, stmp_);
                out.du[i] += stmp_;
                derivative_into(state.u[i], 3, stmp_);
                out.db[i] += stmp_;
            }
        }
        leray_fast(out.du);
        leray_fast(out.db);
        zero_mean(out.du);
        zero_mean(out.db);
    }

    Grid grid_;
    DynamicsConfig cfg_;
    FourierTransform fft_;
    std::vector<double> half_factor_; // exp(-nu |k|^2 dt/2)
    std::vector<double> full_factor_; // exp(-nu |k|^2 dt)
    std::vector<double> filter_;
    std::vector<double> dealias_mask_;
    std::vector<double> ksq_;     // |k|^2 with Nyquist planes dropped
    std::vector<double> inv_ksq_; // 1/|k|^2, 0 at k = 0
    std::vector<double> dk_[3];   // derivative wavenumbers (Nyquist zeroed)
    std::vector<double> kd_[3];   // raw wavenumbers
    double kmax_ = 0.0;
    std::vector<double> pu_[3], pb_[3]; // physical state values
    std::vector<double> wu_[3], wb_[3]; // physical curls
    std::vector<double> prod_[3], scratch_;
    SpectralField stmp_;
    VectorField uxb_;
    MhdRhs f1_, f2_, f3_, f4_;
    MhdState s2_, s3_, s4_;
};

} // namespace mhdbox
