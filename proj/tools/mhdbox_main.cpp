// Command-line front end: run/sweep simulations from flat config files, fit
// decay exponents from ledger CSVs, and self-check the spectral machinery.
// Exit codes: 0 success, 2 validation/usage, 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "mhdbox/mhdbox.hpp"

namespace {

using namespace mhdbox;

std::filesystem::path resolve_output_dir(const RunConfig& cfg, const std::string& cli_override) {
    if (!cli_override.empty()) return cli_override;
    if (const char* env = std::getenv("MHDBOX_OUTPUT_DIR"); env && *env) return env;
    return cfg.output_dir;
}

int do_run(const std::string& config_path, const std::string& out_override, bool force_sweep) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "cannot open config file: " << config_path << "\n";
        return 2;
    }
    RunConfig cfg = parse_config(in);
    if (force_sweep) {
        cfg.mode = RunMode::Sweep;
        cfg.validate();
    }
    RunArtifacts artifacts = run(cfg);
    const auto dir = resolve_output_dir(cfg, out_override);
    emit_report(artifacts, dir);
    std::cout << "status: " << artifacts.report.status << "\n";
    if (!artifacts.report.sweep.empty()) {
        for (const auto& s : artifacts.report.sweep)
            std::cout << "  eps = " << s.epsilon << "  E_total = " << s.final_etotal << "  "
                      << s.status << "\n";
    } else if (!artifacts.report.linear_errors.empty()) {
        for (const auto& p : artifacts.report.linear_errors)
            std::cout << "  dt = " << p.dt << "  error vs oracle = " << p.abs_error << "\n";
        for (double o : artifacts.report.linear_orders) std::cout << "  observed order " << o << "\n";
    } else if (!artifacts.report.conv_dts.empty()) {
        for (std::size_t i = 0; i < artifacts.report.conv_dts.size(); ++i)
            std::cout << "  dt = " << artifacts.report.conv_dts[i] << "  error = "
                      << artifacts.report.conv_errors[i] << "\n";
        for (double o : artifacts.report.conv_orders) std::cout << "  observed order " << o << "\n";
    } else {
        std::cout << "steps:  " << artifacts.report.steps_taken << "\n"
                  << "E_total: " << artifacts.report.energies.total << "\n";
    }
    std::cout << "report: " << (dir / "report.json").string() << "\n";
    return artifacts.report.status == "Completed" ? 0 : 3;
}

int do_fit(const std::string& csv_path, const std::string& quantity, const std::string& window) {
    double t_lo = 0.0, t_hi = 0.0;
    {
        std::stringstream ss(window);
        char comma = 0;
        if (!(ss >> t_lo >> comma >> t_hi) || comma != ',') {
            std::cerr << "--window expects 'a,b'\n";
            return 2;
        }
    }
    std::ifstream in(csv_path);
    if (!in) {
        std::cerr << "cannot open " << csv_path << "\n";
        return 2;
    }
    std::string header;
    if (!std::getline(in, header)) {
        std::cerr << "empty CSV\n";
        return 2;
    }
    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    const auto it = std::find(cols.begin(), cols.end(), quantity);
    if (it == cols.end()) {
        std::cerr << "no column '" << quantity << "' in " << csv_path << "\n";
        return 2;
    }
    const std::size_t col = static_cast<std::size_t>(it - cols.begin());
    std::vector<double> ts, ys;
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::size_t i = 0;
        double t = 0.0, y = 0.0;
        while (std::getline(ss, cell, ',')) {
            if (i == 0) t = std::stod(cell);
            if (i == col) y = std::stod(cell);
            ++i;
        }
        if (t >= t_lo && t <= t_hi) {
            ts.push_back(t);
            ys.push_back(y);
        }
    }
    const DecayFit fit = EnergyLedger::fit_power_law(ts, ys);
    Json j = {{"quantity", quantity}, {"slope", fit.slope},     {"amplitude", fit.amplitude},
              {"t_lo", t_lo},         {"t_hi", t_hi},           {"residual_rms", fit.residual_rms},
              {"samples", fit.samples}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct CheckRunner {
    int failures = 0;
    void operator()(const std::string& name, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
        if (!detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << "\n";
        if (!ok) ++failures;
    }
};

SpectralField random_zero_slice_field(const Grid& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SpectralField f(grid);
    const int lim = grid.n / 2 - 1;
    for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
        if (k3 == 0) return;
        if (std::abs(k1) > lim || std::abs(k2) > lim || std::abs(k3) > lim) return;
        f.c[idx] = Complex{gauss(rng), gauss(rng)};
    });
    hermitian_symmetrize(f);
    for (int i1 = 0; i1 < grid.n; ++i1)
        for (int i2 = 0; i2 < grid.n; ++i2) f.at_index(i1, i2, 0) = Complex{0.0, 0.0};
    return f;
}

int do_check() {
    CheckRunner check;

    // transform roundtrip on a random real field
    {
        const Grid grid(32);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        std::vector<double> values(grid.size());
        for (auto& v : values) v = uni(rng);
        FourierTransform fft(grid.n);
        const auto back = fft.inverse(fft.forward(values, grid));
        double err = 0.0, amp = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            err = std::max(err, std::abs(back[i] - values[i]));
            amp = std::max(amp, std::abs(values[i]));
        }
        check("transform roundtrip", err <= 1e-12 * amp, "max err " + fmt_double(err));
    }

    // Parseval between grid quadrature and coefficient sum
    {
        const Grid grid(16);
        SpectralField f = random_zero_slice_field(grid, 11);
        SpectralField g = random_zero_slice_field(grid, 12);
        FourierTransform fft(grid.n);
        const auto fv = fft.inverse(f), gv = fft.inverse(g);
        double quad = 0.0;
        for (std::size_t i = 0; i < fv.size(); ++i) quad += fv[i] * gv[i];
        quad *= grid.cell_volume();
        const double spectral = inner_l2(f, g);
        const bool ok = std::abs(quad - spectral) <= 1e-12 * std::max(std::abs(quad), 1e-30);
        check("parseval identity", ok, fmt_double(quad) + " vs " + fmt_double(spectral));
    }

    // Leray projection: divergence-free output, idempotent
    {
        const Grid grid(16);
        VectorField w(grid);
        for (int i = 0; i < 3; ++i) w[i] = random_zero_slice_field(grid, 20 + i);
        const VectorField pw = leray_project(w);
        const double div = l2_norm(divergence(pw));
        const double wnorm = sobolev_norm(w, SobolevOrder{1});
        check("leray divergence", div <= 1e-12 * wnorm, fmt_double(div / wnorm));
        VectorField ppw = leray_project(pw);
        ppw -= pw;
        check("leray idempotent", ppw.max_abs() <= 1e-13);
    }

    // Poincare battery: 100 random zero-slice fields, orders 0..4
    {
        const Grid grid(16);
        bool ok = true;
        double worst = 0.0;
        for (int trial = 0; trial < 100 && ok; ++trial) {
            const SpectralField f = random_zero_slice_field(grid, 100 + trial);
            for (int k = 0; k <= 4; ++k) {
                const auto r = poincare_check(f, SobolevOrder{k});
                worst = std::max(worst, r.ratio);
                if (r.lhs > r.rhs * (1.0 + 1e-12)) ok = false;
            }
        }
        check("poincare battery (100 fields, k<=4)", ok, "worst ratio " + fmt_double(worst));
    }

    // dynamics: equilibrium fixed point and exact viscous decay
    {
        const Grid grid(16);
        DynamicsConfig dyn;
        dyn.dt = 1e-2;
        Integrator integ(grid, dyn);
        MhdState zero(grid);
        const MhdState z1 = integ.step(zero);
        check("equilibrium fixed point", z1.u.max_abs() == 0.0 && z1.b.max_abs() == 0.0);

        DynamicsConfig visc = dyn;
        visc.coupling_terms = false;
        visc.nonlinear_terms = false;
        Integrator vinteg(grid, visc);
        MhdState s(grid);
        s.u[1].at_wave(1, 0, 0) = Complex{0.5, 0.0};
        s.u[1].at_wave(-1, 0, 0) = Complex{0.5, 0.0};
        for (int i = 0; i < 100; ++i) s = vinteg.step(s);
        const double expect = 0.5 * std::exp(-1.0);
        const double got = s.u[1].at_wave(1, 0, 0).real();
        check("exact viscous decay", std::abs(got - expect) <= 1e-12 * expect,
              fmt_double(got) + " vs " + fmt_double(expect));
    }

    // short nonlinear balance run
    {
        RunConfig cfg;
        cfg.n = 16;
        cfg.epsilon = 0.05;
        cfg.init.k_max = 2;
        cfg.dynamics.dt = 2e-3;
        cfg.t_end = 1.0;
        cfg.energy.sample_stride = 5;
        cfg.validate();
        const RunArtifacts a = run_single(cfg);
        const bool ok = a.report.status == "Completed" &&
                        a.report.invariants.balance_rel <= 1e-6 &&
                        a.report.invariants.mean <= 1e-13 &&
                        a.report.invariants.divergence_u <= 1e-10 &&
                        a.report.invariants.divergence_b <= 1e-10;
        check("nonlinear balance run", ok,
              "balance_rel " + fmt_double(a.report.invariants.balance_rel));
    }

    std::cout << (check.failures == 0 ? "CHECK OK" : "CHECK FAILED") << "\n";
    return check.failures == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral MHD (zero resistivity) simulator and verification harness"};
    app.require_subcommand(1);

    std::string config_path, out_override, csv_path, quantity, window;

    auto* run_cmd = app.add_subcommand("run", "run a configuration file");
    run_cmd->add_option("config", config_path, "flat section.key = value file")->required();
    run_cmd->add_option("--output-dir", out_override, "override run.output_dir / MHDBOX_OUTPUT_DIR");

    auto* sweep_cmd = app.add_subcommand("sweep", "run an epsilon sweep from a configuration file");
    sweep_cmd->add_option("config", config_path, "flat section.key = value file")->required();
    sweep_cmd->add_option("--output-dir", out_override, "override output directory");

    auto* check_cmd = app.add_subcommand("check", "run the built-in invariant and Poincare battery");

    auto* fit_cmd = app.add_subcommand("fit", "fit a decay exponent from a ledger CSV");
    fit_cmd->add_option("csv", csv_path, "ledger.csv from a run")->required();
    fit_cmd->add_option("--quantity", quantity, "CSV column name")->required();
    fit_cmd->add_option("--window", window, "fit window 'a,b' in time")->required();

    try {
        app.parse(argc, argv);
        if (run_cmd->parsed()) return do_run(config_path, out_override, false);
        if (sweep_cmd->parsed()) return do_run(config_path, out_override, true);
        if (check_cmd->parsed()) return do_check();
        if (fit_cmd->parsed()) return do_fit(csv_path, quantity, window);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const InsufficientData& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const NonPositiveValues& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const NonFinite& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const StepRejected& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
    return 0;
}
