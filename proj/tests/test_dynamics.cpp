#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace mhdbox;
using namespace mhdbox::testing;

namespace {

// Reference right-hand side in the literal convective form
//   du = P(-u.grad u + b.grad b + d3 b), db = P(-u.grad b + b.grad u + d3 u),
// products on the physical grid, 2/3-dealiased. Slow; used as the oracle for
// the integrator's rotational-form evaluation.
MhdRhs convective_rhs_reference(const MhdState& state) {
    const Grid& g = state.grid();
    FourierTransform fft(g.n);
    std::array<std::vector<double>, 3> pu, pb;
    for (int i = 0; i < 3; ++i) {
        pu[i] = fft.inverse(state.u[i]);
        pb[i] = fft.inverse(state.b[i]);
    }
    const std::size_t m = g.size();
    MhdRhs out(g);
    for (int i = 0; i < 3; ++i) {
        std::vector<double> au(m, 0.0), ab(m, 0.0);
        for (int j = 1; j <= 3; ++j) {
            const auto dui = fft.inverse(derivative(state.u[i], j));
            const auto dbi = fft.inverse(derivative(state.b[i], j));
            for (std::size_t x = 0; x < m; ++x) {
                au[x] += -pu[j - 1][x] * dui[x] + pb[j - 1][x] * dbi[x];
                ab[x] += -pu[j - 1][x] * dbi[x] + pb[j - 1][x] * dui[x];
            }
        }
        out.du[i] = fft.forward(au, g);
        out.db[i] = fft.forward(ab, g);
        truncate_modes(out.du[i], g.dealias_limit());
        truncate_modes(out.db[i], g.dealias_limit());
        out.du[i] += derivative(state.b[i], 3);
        out.db[i] += derivative(state.u[i], 3);
    }
    leray_project_in_place(out.du);
    leray_project_in_place(out.db);
    zero_mean(out.du);
    zero_mean(out.db);
    return out;
}

MhdState small_random_state(const Grid& g, std::uint64_t seed, double eps) {
    InitSpec spec;
    spec.seed = seed;
    spec.epsilon = eps;
    spec.s = 2;
    spec.k_max = std::min(3, g.dealias_limit());
    return generate(spec, g);
}

// exp(t [[-nu m^2, i m],[i m, 0]]), written out independently of the library.
std::array<Complex, 4> mode_matrix_exponential(double nu, int m, double t) {
    const Complex a11{-nu * static_cast<double>(m) * m, 0.0};
    const Complex a12{0.0, static_cast<double>(m)};
    const Complex disc = std::sqrt(a11 * a11 + 4.0 * a12 * a12);
    const Complex lp = 0.5 * (a11 + disc), lm = 0.5 * (a11 - disc);
    const Complex ep = std::exp(lp * t), em = std::exp(lm * t);
    const Complex den = lp - lm;
    return {(ep * (a11 - lm) - em * (a11 - lp)) / den, (ep - em) * a12 / den,
            (ep - em) * a12 / den, (ep * (-lm) - em * (-lp)) / den};
}

} // namespace

TEST_CASE("rhs vanishes on b alone when u = 0", "[dynamics]") {
    const Grid grid(16);
    Integrator integ(grid, DynamicsConfig{});
    MhdState state(grid);
    state.b[0] = sine_field(grid, 0, 0, 1, 0.3); // b_h odd: in class
    const MhdRhs r = integ.rhs(state);
    CHECK(r.db.max_abs() == 0.0);
}

TEST_CASE("rhs of b = (sin x3, 0, 0) drives du = (cos x3, 0, 0)", "[dynamics]") {
    const Grid grid(16);
    Integrator integ(grid, DynamicsConfig{});
    MhdState state(grid);
    state.b[0] = sine_field(grid, 0, 0, 1, 1.0);
    const MhdRhs r = integ.rhs(state);
    VectorField expect(grid);
    expect[0] = cosine_field(grid, 0, 0, 1, 1.0);
    CHECK(max_diff(r.du, expect) < 1e-15);
    CHECK(r.db.max_abs() == 0.0);
}

TEST_CASE("rotational evaluation matches the convective form through the projector",
          "[dynamics]") {
    const Grid grid(24);
    const MhdState state = small_random_state(grid, 9, 0.8);
    Integrator integ(grid, DynamicsConfig{});
    const MhdRhs fast = integ.rhs(state);
    const MhdRhs ref = convective_rhs_reference(state);
    const double scale = std::max({ref.du.max_abs(), ref.db.max_abs(), 1e-30});
    CHECK(max_diff(fast.du, ref.du) <= 1e-12 * scale);
    CHECK(max_diff(fast.db, ref.db) <= 1e-12 * scale);
}

TEST_CASE("transport and coupling terms cancel in the energy inner product", "[dynamics]") {
    const Grid grid(32);
    const MhdState state = small_random_state(grid, 4, 0.5);
    Integrator integ(grid, DynamicsConfig{});
    const MhdRhs r = integ.rhs(state);

    // spectral route
    const double s_spectral = inner_l2(state.u, r.du) + inner_l2(state.b, r.db);

    // independent oracle: direct quadrature on the physical grid
    FourierTransform fft(grid.n);
    double s_quad = 0.0;
    for (int i = 0; i < 3; ++i) {
        const auto uv = fft.inverse(state.u[i]);
        const auto duv = fft.inverse(r.du[i]);
        const auto bv = fft.inverse(state.b[i]);
        const auto dbv = fft.inverse(r.db[i]);
        for (std::size_t x = 0; x < grid.size(); ++x)
            s_quad += uv[x] * duv[x] + bv[x] * dbv[x];
    }
    s_quad *= grid.cell_volume();

    const double scale =
        std::sqrt(l2_norm_sq(state.u)) * std::sqrt(l2_norm_sq(r.du)) +
        std::sqrt(l2_norm_sq(state.b)) * std::sqrt(l2_norm_sq(r.db)) +
        integ.config().nu * gradient_norm_sq(state.u);
    CHECK(std::abs(s_spectral) <= 1e-10 * scale);
    CHECK(std::abs(s_quad) <= 1e-10 * scale);
    CHECK(std::abs(s_spectral - s_quad) <= 1e-11 * scale);
}

TEST_CASE("zero state is an exact fixed point", "[dynamics]") {
    const Grid grid(16);
    DynamicsConfig cfg;
    cfg.dt = 1e-2;
    Integrator integ(grid, cfg);
    MhdState state(grid);
    for (int i = 0; i < 5; ++i) state = integ.step(state);
    CHECK(state.u.max_abs() == 0.0);
    CHECK(state.b.max_abs() == 0.0);
    CHECK(state.dissipated == 0.0);
}

TEST_CASE("viscous factor is exact when coupling and nonlinearity are off", "[dynamics]") {
    const Grid grid(16);
    DynamicsConfig cfg;
    cfg.dt = 5e-3;
    cfg.coupling_terms = false;
    cfg.nonlinear_terms = false;
    Integrator integ(grid, cfg);
    MhdState state(grid);
    state.u[1] = cosine_field(grid, 1, 0, 0, 0.8);
    for (int i = 0; i < 200; ++i) state = integ.step(state);
    const double expect = 0.4 * std::exp(-state.time); // |k|^2 = 1, nu = 1
    const double got = state.u[1].at_wave(1, 0, 0).real();
    CHECK(std::abs(got - expect) <= 1e-12 * expect);
}

TEST_CASE("a single transverse mode decays viscously under the full rhs", "[dynamics]") {
    const Grid grid(16);
    DynamicsConfig cfg;
    cfg.dt = 5e-3;
    Integrator integ(grid, cfg);
    MhdState state(grid);
    state.u[1] = cosine_field(grid, 1, 0, 0, 0.1); // u.grad u self-cancels, b stays 0
    for (int i = 0; i < 100; ++i) state = integ.step(state);
    const double expect = 0.05 * std::exp(-state.time);
    const double got = state.u[1].at_wave(1, 0, 0).real();
    CHECK(std::abs(got - expect) <= 1e-11 * expect);
    CHECK(state.b.max_abs() <= 1e-14);
}

TEST_CASE("linearized coupling follows the 2x2 matrix exponential", "[dynamics]") {
    const Grid grid(8);
    DynamicsConfig cfg;
    cfg.dt = 1e-3;
    cfg.nonlinear_terms = false;
    Integrator integ(grid, cfg);
    MhdState state = linearized_initial_state(grid, 1, 1.0);
    const Complex u0 = state.u[0].at_wave(0, 0, 1);
    const Complex b0 = state.b[0].at_wave(0, 0, 1);
    for (int i = 0; i < 2000; ++i) state = integ.step(state);

    const auto E = mode_matrix_exponential(1.0, 1, 2.0);
    const Complex u_expect = E[0] * u0 + E[1] * b0;
    const Complex b_expect = E[2] * u0 + E[3] * b0;
    CHECK(std::abs(state.u[0].at_wave(0, 0, 1) - u_expect) <= 1e-6);
    CHECK(std::abs(state.b[0].at_wave(0, 0, 1) - b_expect) <= 1e-6);

    // eigenvalues (-1 +- i sqrt(3))/2: envelope e^{-t/2} up to the (non-normal)
    // eigenbasis factor, and the solver modulus tracks the oracle's exactly
    const double amp = std::sqrt(std::norm(state.u[0].at_wave(0, 0, 1)) +
                                 std::norm(state.b[0].at_wave(0, 0, 1)));
    const double amp_exact = std::sqrt(std::norm(u_expect) + std::norm(b_expect));
    CHECK(std::abs(amp - amp_exact) <= 1e-6);
    CHECK(amp <= 2.0 * std::sqrt(std::norm(u0) + std::norm(b0)) * std::exp(-0.5 * 2.0));
}

TEST_CASE("observed convergence order of the stepper is four", "[dynamics][slow]") {
    RunConfig cfg;
    cfg.n = 16;
    cfg.epsilon = 0.5;
    cfg.init.s = 2;
    cfg.init.k_max = 2;
    cfg.t_end = 0.5;
    cfg.mode = RunMode::Convergence;
    cfg.convergence_dts = {0.02, 0.01, 0.005};
    cfg.validate();
    const RunArtifacts a = run_convergence(cfg);
    REQUIRE(a.report.conv_orders.size() == 2);
    for (double order : a.report.conv_orders) CHECK(std::abs(order - 4.0) <= 0.2);
}

TEST_CASE("step rejects CFL violations", "[dynamics]") {
    const Grid grid(16);
    DynamicsConfig cfg;
    cfg.dt = 2e-2;
    Integrator integ(grid, cfg);
    MhdState state(grid);
    state.u[1] = cosine_field(grid, 1, 0, 0, 10.0);
    CHECK(integ.cfl_number(state) > cfg.cfl_limit);
    CHECK_THROWS_AS(integ.step(state), StepRejected);
    CHECK_THROWS_AS(integ.rhs(state), StepRejected);
}

TEST_CASE("step flags non-finite states", "[dynamics]") {
    const Grid grid(8);
    DynamicsConfig cfg;
    cfg.dt = 1e-3;
    Integrator integ(grid, cfg);
    MhdState state(grid);
    state.u[0].at_wave(1, 0, 1) = Complex{std::nan(""), 0.0};
    state.u[0].at_wave(-1, 0, -1) = Complex{std::nan(""), 0.0};
    CHECK_THROWS_AS(integ.step(state), NonFinite);
}

TEST_CASE("steps preserve divergence, means and the dealiased shell", "[dynamics]") {
    const Grid grid(16);
    DynamicsConfig cfg;
    cfg.dt = 5e-3;
    Integrator integ(grid, cfg);
    MhdState state = small_random_state(grid, 15, 0.4);
    for (int i = 0; i < 50; ++i) state = integ.step(state);
    CHECK(divergence_residual(state.u) <= 1e-12);
    CHECK(divergence_residual(state.b) <= 1e-12);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(state.u[i].c[0]) == 0.0);
        CHECK(std::abs(state.b[i].c[0]) == 0.0);
    }
    double outside = 0.0;
    for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
        if (std::max({std::abs(k1), std::abs(k2), std::abs(k3)}) > grid.dealias_limit())
            for (int i = 0; i < 3; ++i)
                outside = std::max({outside, std::abs(state.u[i].c[idx]),
                                    std::abs(state.b[i].c[idx])});
    });
    CHECK(outside == 0.0);
}

TEST_CASE("parity persists without enforcement over many steps", "[dynamics][slow]") {
    const Grid grid(8);
    DynamicsConfig cfg;
    cfg.dt = 4e-2;
    REQUIRE(cfg.enforce_parity == false);
    Integrator integ(grid, cfg);
    InitSpec spec;
    spec.seed = 3;
    spec.epsilon = 0.1;
    spec.s = 2;
    spec.k_max = 2;
    MhdState state = generate(spec, grid);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        state = integ.step(state);
        if (i % 500 == 0)
            worst = std::max({worst, parity_residual(state.u, FieldRole::Velocity),
                              parity_residual(state.b, FieldRole::Magnetic)});
    }
    worst = std::max({worst, parity_residual(state.u, FieldRole::Velocity),
                      parity_residual(state.b, FieldRole::Magnetic)});
    CHECK(worst <= 1e-8);
}

TEST_CASE("optional parity enforcement keeps the class exactly", "[dynamics]") {
    const Grid grid(8);
    DynamicsConfig cfg;
    cfg.dt = 1e-2;
    cfg.enforce_parity = true;
    Integrator integ(grid, cfg);
    MhdState state = small_random_state(grid, 6, 0.2);
    for (int i = 0; i < 20; ++i) state = integ.step(state);
    CHECK(parity_residual(state.u, FieldRole::Velocity) == 0.0);
    CHECK(parity_residual(state.b, FieldRole::Magnetic) == 0.0);
}

TEST_CASE("recovered pressure vanishes for trivial states", "[dynamics][pressure]") {
    const Grid grid(16);
    Integrator integ(grid, DynamicsConfig{});
    MhdState zero(grid);
    CHECK(integ.recover_pressure(zero).max_abs() == 0.0);

    MhdState state(grid);
    state.b[0] = sine_field(grid, 0, 0, 1, 1.0);
    CHECK(integ.recover_pressure(state).max_abs() <= 1e-15);
}

TEST_CASE("pressure closes the momentum forcing divergence", "[dynamics][pressure]") {
    const Grid grid(16);
    const MhdState state = small_random_state(grid, 31, 0.8);
    Integrator integ(grid, DynamicsConfig{});
    const SpectralField p = integ.recover_pressure(state);
    CHECK(std::abs(p.c[0]) == 0.0);

    VectorField forcing = integ.momentum_forcing(state);
    const double div_before = l2_norm(divergence(forcing));
    forcing -= gradient(p);
    const double div_after = l2_norm(divergence(forcing));
    CHECK(div_after <= 1e-10 * std::max(div_before, 1e-30));
}
