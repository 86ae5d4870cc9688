#pragma once

#include <charconv>
#include <chrono>
#include <complex>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "mhdbox/config.hpp"
#include "mhdbox/diagnostics.hpp"
#include "mhdbox/dynamics.hpp"
#include "mhdbox/initial_data.hpp"
#include "mhdbox/snapshot.hpp"

namespace mhdbox {

using Json = nlohmann::ordered_json;

struct InvariantMaxima {
    double divergence_u = 0.0;
    double divergence_b = 0.0;
    double parity_u = 0.0;
    double parity_b = 0.0;
    double mean = 0.0;
    double balance = 0.0;
    double balance_rel = 0.0;
    double initial_energy = 0.0;
};

struct FitEntry {
    DecayFit fit;
    std::string status = "ok";
};

struct LinearPoint {
    double dt = 0.0;
    double abs_error = 0.0;
    double rel_error = 0.0;
};

struct SweepEntry {
    double epsilon = 0.0;
    std::string status;
    double final_etotal = 0.0;
};

struct RunReport {
    std::vector<std::pair<std::string, std::string>> config;
    std::string status = "Completed"; // Completed | NonFinite | StepRejected
    std::optional<double> failure_time;
    long long steps_taken = 0;
    double wall_seconds = 0.0;
    InvariantMaxima invariants;
    EnergyTotals energies;
    bool verdicts_available = false;
    std::string verdicts_reason;
    std::map<std::string, BoundednessEntry> verdicts;
    std::vector<FitEntry> fits;
    std::vector<LinearPoint> linear_errors;
    std::vector<double> linear_orders;
    double offmode_max = 0.0;
    std::vector<double> conv_dts, conv_errors, conv_orders;
    std::vector<SweepEntry> sweep;
};

inline Json to_json(const RunReport& r) {
    Json j;
    Json cfg = Json::object();
    for (const auto& [k, v] : r.config) cfg[k] = v;
    j["config"] = cfg;
    j["status"] = r.status;
    if (r.failure_time) j["failure_time"] = *r.failure_time;
    j["steps_taken"] = r.steps_taken;
    j["wall_seconds"] = r.wall_seconds;
    j["invariants"] = {{"divergence_u_max", r.invariants.divergence_u},
                       {"divergence_b_max", r.invariants.divergence_b},
                       {"parity_u_max", r.invariants.parity_u},
                       {"parity_b_max", r.invariants.parity_b},
                       {"mean_max", r.invariants.mean},
                       {"balance_max", r.invariants.balance},
                       {"balance_rel_max", r.invariants.balance_rel},
                       {"initial_energy", r.invariants.initial_energy}};
    j["energies"] = {{"E0", r.energies.e0_high}, {"G0", r.energies.g0}, {"G1", r.energies.g1},
                     {"E1", r.energies.e1},      {"e0", r.energies.e0_low},
                     {"Etotal", r.energies.total}};
    Json verdicts;
    verdicts["available"] = r.verdicts_available;
    if (!r.verdicts_reason.empty()) verdicts["reason"] = r.verdicts_reason;
    Json entries = Json::object();
    for (const auto& [name, e] : r.verdicts)
        entries[name] = {{"final", e.final_value},
                         {"tail_ratio", e.tail_ratio},
                         {"bounded", e.bounded}};
    verdicts["entries"] = entries;
    j["verdicts"] = verdicts;
    Json fits = Json::array();
    for (const auto& f : r.fits)
        fits.push_back({{"quantity", f.fit.quantity},
                        {"slope", f.fit.slope},
                        {"amplitude", f.fit.amplitude},
                        {"t_lo", f.fit.t_lo},
                        {"t_hi", f.fit.t_hi},
                        {"residual_rms", f.fit.residual_rms},
                        {"samples", f.fit.samples},
                        {"status", f.status}});
    j["fits"] = fits;
    if (!r.linear_errors.empty()) {
        Json lin = Json::array();
        for (const auto& p : r.linear_errors)
            lin.push_back({{"dt", p.dt}, {"abs_error", p.abs_error}, {"rel_error", p.rel_error}});
        j["linearized"] = {{"errors", lin}, {"orders", r.linear_orders},
                           {"offmode_max", r.offmode_max}};
    }
    if (!r.conv_dts.empty())
        j["convergence"] = {{"dts", r.conv_dts}, {"errors", r.conv_errors},
                            {"orders", r.conv_orders}};
    if (!r.sweep.empty()) {
        Json sw = Json::array();
        for (const auto& s : r.sweep)
            sw.push_back({{"epsilon", s.epsilon},
                          {"status", s.status},
                          {"final_Etotal", s.final_etotal}});
        j["sweep"] = sw;
    }
    return j;
}

inline RunReport report_from_json(const Json& j) {
    RunReport r;
    for (const auto& [k, v] : j.at("config").items())
        r.config.emplace_back(k, v.get<std::string>());
    r.status = j.at("status").get<std::string>();
    if (j.contains("failure_time")) r.failure_time = j["failure_time"].get<double>();
    r.steps_taken = j.at("steps_taken").get<long long>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    const auto& inv = j.at("invariants");
    r.invariants.divergence_u = inv.at("divergence_u_max").get<double>();
    r.invariants.divergence_b = inv.at("divergence_b_max").get<double>();
    r.invariants.parity_u = inv.at("parity_u_max").get<double>();
    r.invariants.parity_b = inv.at("parity_b_max").get<double>();
    r.invariants.mean = inv.at("mean_max").get<double>();
    r.invariants.balance = inv.at("balance_max").get<double>();
    r.invariants.balance_rel = inv.at("balance_rel_max").get<double>();
    r.invariants.initial_energy = inv.at("initial_energy").get<double>();
    const auto& en = j.at("energies");
    r.energies.e0_high = en.at("E0").get<double>();
    r.energies.g0 = en.at("G0").get<double>();
    r.energies.g1 = en.at("G1").get<double>();
    r.energies.e1 = en.at("E1").get<double>();
    r.energies.e0_low = en.at("e0").get<double>();
    r.energies.total = en.at("Etotal").get<double>();
    const auto& ver = j.at("verdicts");
    r.verdicts_available = ver.at("available").get<bool>();
    if (ver.contains("reason")) r.verdicts_reason = ver["reason"].get<std::string>();
    for (const auto& [name, e] : ver.at("entries").items()) {
        BoundednessEntry be;
        be.final_value = e.at("final").get<double>();
        be.tail_ratio = e.at("tail_ratio").get<double>();
        be.bounded = e.at("bounded").get<bool>();
        r.verdicts[name] = be;
    }
    for (const auto& f : j.at("fits")) {
        FitEntry fe;
        fe.fit.quantity = f.at("quantity").get<std::string>();
        fe.fit.slope = f.at("slope").get<double>();
        fe.fit.amplitude = f.at("amplitude").get<double>();
        fe.fit.t_lo = f.at("t_lo").get<double>();
        fe.fit.t_hi = f.at("t_hi").get<double>();
        fe.fit.residual_rms = f.at("residual_rms").get<double>();
        fe.fit.samples = f.at("samples").get<int>();
        fe.status = f.at("status").get<std::string>();
        r.fits.push_back(fe);
    }
    if (j.contains("linearized")) {
        for (const auto& p : j["linearized"].at("errors")) {
            LinearPoint lp;
            lp.dt = p.at("dt").get<double>();
            lp.abs_error = p.at("abs_error").get<double>();
            lp.rel_error = p.at("rel_error").get<double>();
            r.linear_errors.push_back(lp);
        }
        r.linear_orders = j["linearized"].at("orders").get<std::vector<double>>();
        r.offmode_max = j["linearized"].at("offmode_max").get<double>();
    }
    if (j.contains("convergence")) {
        r.conv_dts = j["convergence"].at("dts").get<std::vector<double>>();
        r.conv_errors = j["convergence"].at("errors").get<std::vector<double>>();
        r.conv_orders = j["convergence"].at("orders").get<std::vector<double>>();
    }
    if (j.contains("sweep")) {
        for (const auto& s : j["sweep"]) {
            SweepEntry se;
            se.epsilon = s.at("epsilon").get<double>();
            se.status = s.at("status").get<std::string>();
            se.final_etotal = s.at("final_Etotal").get<double>();
            r.sweep.push_back(se);
        }
    }
    return r;
}

inline bool operator==(const RunReport& a, const RunReport& b) {
    return to_json(a) == to_json(b);
}

struct RunArtifacts {
    RunReport report;
    std::string ledger_csv;
    std::vector<SnapshotRecord> snapshots;
    std::vector<std::pair<std::string, RunArtifacts>> children;
};

namespace detail {

inline std::string csv_header() {
    std::string h = "t";
    for (const auto& [name, member] : norm_sample_columns()) h += "," + name;
    h += ",E0,G0,G1,E1,e0,Etotal,balance_residual";
    return h;
}

inline void append_csv_row(std::string& csv, const NormSample& s, const EnergyTotals& e,
                           double balance) {
    csv += fmt_double(s.t);
    for (const auto& [name, member] : norm_sample_columns()) csv += "," + fmt_double(s.*member);
    csv += "," + fmt_double(e.e0_high) + "," + fmt_double(e.g0) + "," + fmt_double(e.g1) + "," +
           fmt_double(e.e1) + "," + fmt_double(e.e0_low) + "," + fmt_double(e.total) + "," +
           fmt_double(balance) + "\n";
}

// exp(t A) for the per-mode linearized pair (u1, b1) at k = (0,0,m):
//   A = [[-nu m^2, i m], [i m, 0]].
// Closed form through the eigen decomposition; the degenerate (equal
// eigenvalue) case falls back to the Jordan form.
inline std::array<std::complex<double>, 4> linear_mode_propagator(double nu, int m, double t) {
    using C = std::complex<double>;
    const double msq = static_cast<double>(m) * m;
    const C a11{-nu * msq, 0.0}, a12{0.0, static_cast<double>(m)};
    const C a21 = a12, a22{0.0, 0.0};
    const C tr = a11 + a22;
    const C disc = std::sqrt(C{nu * nu * msq * msq - 4.0 * msq, 0.0});
    const C lp = 0.5 * (tr + disc), lm = 0.5 * (tr - disc);
    if (std::abs(lp - lm) < 1e-12) {
        // exp(tA) = e^{lt} (I + t (A - l I))
        const C e = std::exp(lp * t);
        return {e * (1.0 + t * (a11 - lp)), e * t * a12, e * t * a21, e * (1.0 + t * (a22 - lp))};
    }
    const C ep = std::exp(lp * t), em = std::exp(lm * t);
    const C den = lp - lm;
    // exp(tA) = ep (A - lm I)/(lp - lm) + em (A - lp I)/(lm - lp)
    return {(ep * (a11 - lm) - em * (a11 - lp)) / den, (ep - em) * a12 / den,
            (ep - em) * a21 / den, (ep * (a22 - lm) - em * (a22 - lp)) / den};
}

} // namespace detail

// Single-mode state for the linearized coupling test: u1 = eps cos(m x3)
// (even), b1 = -eps sin(m x3) (odd), both in class and divergence-free.
inline MhdState linearized_initial_state(const Grid& grid, int m, double eps) {
    MhdState state(grid);
    state.u[0].at_wave(0, 0, m) = Complex{eps / 2.0, 0.0};
    state.u[0].at_wave(0, 0, -m) = Complex{eps / 2.0, 0.0};
    state.b[0].at_wave(0, 0, m) = Complex{0.0, eps / 2.0};
    state.b[0].at_wave(0, 0, -m) = Complex{0.0, -eps / 2.0};
    return state;
}

inline RunArtifacts run_single(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const Grid grid = cfg.grid();
    Integrator integ(grid, cfg.dynamics);
    NormEvaluator evaluator(grid, cfg.energy);
    EnergyLedger ledger(cfg.energy);

    RunArtifacts out;
    out.report.config = echo_config(cfg);
    out.ledger_csv = detail::csv_header() + "\n";

    MhdState state = generate(cfg.init, grid);
    InvariantMaxima& inv = out.report.invariants;
    inv.initial_energy = state.energy();

    auto take_sample = [&](const MhdState& st) {
        const NormSample s = evaluator.sample(st);
        ledger.update(s);
        detail::append_csv_row(out.ledger_csv, s, ledger.totals(), ledger.balance_residual());
        inv.divergence_u = std::max(inv.divergence_u, divergence_residual(st.u));
        inv.divergence_b = std::max(inv.divergence_b, divergence_residual(st.b));
        inv.parity_u = std::max(inv.parity_u, parity_residual(st.u, FieldRole::Velocity));
        inv.parity_b = std::max(inv.parity_b, parity_residual(st.b, FieldRole::Magnetic));
        for (int i = 0; i < 3; ++i)
            inv.mean = std::max({inv.mean, std::abs(st.u[i].c[0]), std::abs(st.b[i].c[0])});
        inv.balance = std::max(inv.balance, std::abs(ledger.balance_residual()));
    };

    std::vector<double> snap_times = cfg.snapshot_times;
    std::sort(snap_times.begin(), snap_times.end());
    std::size_t next_snap = 0;
    auto maybe_snapshot = [&](const MhdState& st) {
        while (next_snap < snap_times.size() &&
               st.time >= snap_times[next_snap] - cfg.dynamics.dt / 2.0) {
            SnapshotRecord rec;
            rec.time = st.time;
            const char* names[6] = {"u1", "u2", "u3", "b1", "b2", "b3"};
            for (int i = 0; i < 3; ++i) rec.fields.emplace_back(names[i], st.u[i]);
            for (int i = 0; i < 3; ++i) rec.fields.emplace_back(names[3 + i], st.b[i]);
            out.snapshots.push_back(std::move(rec));
            ++next_snap;
        }
    };

    take_sample(state);
    maybe_snapshot(state);

    const long long steps = cfg.steps();
    long long step = 0;
    try {
        for (step = 1; step <= steps; ++step) {
            state = integ.step(state);
            maybe_snapshot(state);
            if (step % cfg.energy.sample_stride == 0) take_sample(state);
        }
        out.report.status = "Completed";
    } catch (const NonFinite&) {
        out.report.status = "NonFinite";
        out.report.failure_time = state.time;
    } catch (const StepRejected&) {
        out.report.status = "StepRejected";
        out.report.failure_time = state.time;
    }
    out.report.steps_taken = std::min(step, steps);

    inv.balance_rel =
        inv.initial_energy > 0.0 ? ledger.max_abs_balance_residual() / inv.initial_energy : 0.0;
    out.report.energies = ledger.totals();

    try {
        out.report.verdicts = ledger.boundedness_verdict();
        out.report.verdicts_available = true;
    } catch (const RunTooShort& e) {
        out.report.verdicts_available = false;
        out.report.verdicts_reason = e.what();
    }

    for (const char* q :
         {"u_H2sm2", "d3u_H2sm2", "d3b_H2sm2", "d3u_H2s", "d3b_H2s", "b_H2s"}) {
        FitEntry fe;
        try {
            fe.fit = ledger.fit_decay(q, cfg.t_end / 2.0, cfg.t_end);
        } catch (const Error& e) {
            fe.fit.quantity = q;
            fe.status = std::string("skipped: ") + e.what();
        }
        out.report.fits.push_back(fe);
    }

    out.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

inline RunArtifacts run_sweep(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunArtifacts out;
    out.report.config = echo_config(cfg);
    for (double eps : cfg.sweep_epsilons) {
        RunConfig sub = cfg;
        sub.mode = RunMode::Single;
        sub.init.epsilon = eps;
        sub.sweep_epsilons.clear();
        RunArtifacts child = run_single(sub);
        SweepEntry entry;
        entry.epsilon = eps;
        entry.status = child.report.status;
        entry.final_etotal = child.report.energies.total;
        out.report.sweep.push_back(entry);
        if (child.report.status != "Completed") out.report.status = child.report.status;
        out.children.emplace_back("eps_" + fmt_double(eps), std::move(child));
    }
    out.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

// Quadratic terms disabled; each mode evolves by the exact 2x2 system, so the
// solver is measured directly against the matrix exponential.
inline RunArtifacts run_linearized(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunArtifacts out;
    out.report.config = echo_config(cfg);
    const Grid grid = cfg.grid();
    const int m = cfg.linear_mode[2];
    const double eps = cfg.init.epsilon;

    std::vector<double> dts = cfg.convergence_dts;
    if (dts.empty()) dts.push_back(cfg.dynamics.dt);

    const auto prop = detail::linear_mode_propagator(cfg.dynamics.nu, m, cfg.t_end);
    const Complex u0{eps / 2.0, 0.0}, b0{0.0, eps / 2.0};
    const Complex u_exact = prop[0] * u0 + prop[1] * b0;
    const Complex b_exact = prop[2] * u0 + prop[3] * b0;

    for (double dt : dts) {
        DynamicsConfig dyn = cfg.dynamics;
        dyn.dt = dt;
        dyn.nonlinear_terms = false;
        Integrator integ(grid, dyn);
        MhdState state = linearized_initial_state(grid, m, eps);
        const long long steps = std::llround(cfg.t_end / dt);
        for (long long i = 0; i < steps; ++i) state = integ.step(state);

        const Complex u_num = state.u[0].at_wave(0, 0, m);
        const Complex b_num = state.b[0].at_wave(0, 0, m);
        LinearPoint p;
        p.dt = dt;
        p.abs_error = std::abs(u_num - u_exact) + std::abs(b_num - b_exact);
        p.rel_error = eps > 0.0 ? p.abs_error / eps : p.abs_error;
        out.report.linear_errors.push_back(p);

        // everything off the driven mode must stay at round-off
        double off = 0.0;
        for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
            if (k1 == 0 && k2 == 0 && std::abs(k3) == m) return;
            for (int i = 0; i < 3; ++i)
                off = std::max({off, std::abs(state.u[i].c[idx]), std::abs(state.b[i].c[idx])});
        });
        out.report.offmode_max = std::max(out.report.offmode_max, off);
    }
    for (std::size_t i = 0; i + 1 < out.report.linear_errors.size(); ++i) {
        const auto& a = out.report.linear_errors[i];
        const auto& b = out.report.linear_errors[i + 1];
        if (a.abs_error > 0.0 && b.abs_error > 0.0 && a.dt != b.dt)
            out.report.linear_orders.push_back(std::log(a.abs_error / b.abs_error) /
                                               std::log(a.dt / b.dt));
    }
    out.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

// Richardson-style order measurement on the nonlinear solver: each dt in the
// list against a reference run at min(dt)/4.
inline RunArtifacts run_convergence(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunArtifacts out;
    out.report.config = echo_config(cfg);
    const Grid grid = cfg.grid();

    std::vector<double> dts = cfg.convergence_dts;
    std::sort(dts.begin(), dts.end(), std::greater<>());
    const double dt_ref = dts.back() / 4.0;

    auto evolve = [&](double dt) {
        DynamicsConfig dyn = cfg.dynamics;
        dyn.dt = dt;
        Integrator integ(grid, dyn);
        MhdState state = generate(cfg.init, grid);
        const long long steps = std::llround(cfg.t_end / dt);
        for (long long i = 0; i < steps; ++i) state = integ.step(state);
        return state;
    };

    const MhdState ref = evolve(dt_ref);
    for (double dt : dts) {
        const MhdState s = evolve(dt);
        double err = 0.0;
        for (int i = 0; i < 3; ++i) {
            SpectralField du = s.u[i] - ref.u[i];
            SpectralField db = s.b[i] - ref.b[i];
            err = std::max({err, du.max_abs(), db.max_abs()});
        }
        out.report.conv_dts.push_back(dt);
        out.report.conv_errors.push_back(err);
    }
    for (std::size_t i = 0; i + 1 < dts.size(); ++i)
        if (out.report.conv_errors[i] > 0.0 && out.report.conv_errors[i + 1] > 0.0)
            out.report.conv_orders.push_back(
                std::log(out.report.conv_errors[i] / out.report.conv_errors[i + 1]) /
                std::log(dts[i] / dts[i + 1]));
    out.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

inline RunArtifacts run(const RunConfig& cfg) {
    switch (cfg.mode) {
        case RunMode::Sweep: return run_sweep(cfg);
        case RunMode::Convergence: return run_convergence(cfg);
        case RunMode::Linearized: return run_linearized(cfg);
        case RunMode::Single: break;
    }
    return run_single(cfg);
}

inline void emit_report(const RunArtifacts& artifacts, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "report.json", std::ios::trunc);
        if (!f) throw IoError("cannot write " + (dir / "report.json").string());
        f << to_json(artifacts.report).dump(2) << "\n";
    }
    if (!artifacts.ledger_csv.empty()) {
        std::ofstream f(dir / "ledger.csv", std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + (dir / "ledger.csv").string());
        f.write(artifacts.ledger_csv.data(),
                static_cast<std::streamsize>(artifacts.ledger_csv.size()));
    }
    for (std::size_t i = 0; i < artifacts.snapshots.size(); ++i)
        write_snapshot(dir / ("snapshot_" + std::to_string(i)), artifacts.snapshots[i]);
    for (const auto& [name, child] : artifacts.children) emit_report(child, dir / name);
}

} // namespace mhdbox
