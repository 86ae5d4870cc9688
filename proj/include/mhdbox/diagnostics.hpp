#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "mhdbox/dynamics.hpp"
#include "mhdbox/norms.hpp"

namespace mhdbox {

struct EnergyConfig {
    double sigma = 0.5;    // time-weight exponent, 0 < sigma < 1
    int s = 5;             // Sobolev index; orders 2s-3 .. 2s+2 are sampled
    int sample_stride = 5; // steps between ledger samples

    void validate() const {
        if (!(sigma > 0.0 && sigma < 1.0))
            throw ValidationError("energy.sigma", "must satisfy 0 < sigma < 1");
        if (s < 2) throw ValidationError("energy.s", "must be >= 2 (needs H^{2s-3})");
        if (sample_stride < 1) throw ValidationError("energy.sample_stride", "must be >= 1");
    }
};

// Instantaneous squared norms feeding the time-weighted energies, plus the
// L2 quantities of the balance law. `dissipated` is carried over from the
// state (integrator quadrature of nu int ||grad u||^2).
struct NormSample {
    double t = 0.0;
    double u_h2s1 = 0.0;    // ||u||^2_{H^{2s+1}}
    double b_h2s1 = 0.0;    // ||b||^2_{H^{2s+1}}
    double u_h2s2 = 0.0;    // ||u||^2_{H^{2s+2}}
    double d3b_h2s = 0.0;   // ||d3 b||^2_{H^{2s}}
    double d3u_h2s = 0.0;   // ||d3 u||^2_{H^{2s}}
    double d3u_h2s1 = 0.0;  // ||d3 u||^2_{H^{2s+1}}
    double d3u_h2sm2 = 0.0; // ||d3 u||^2_{H^{2s-2}}
    double d3b_h2sm2 = 0.0; // ||d3 b||^2_{H^{2s-2}}
    double d3u_h2sm1 = 0.0; // ||d3 u||^2_{H^{2s-1}}
    double u_h2sm2 = 0.0;   // ||u||^2_{H^{2s-2}}
    double u_h2sm1 = 0.0;   // ||u||^2_{H^{2s-1}}
    double d3b_h2sm3 = 0.0; // ||d3 b||^2_{H^{2s-3}}
    double b_h2s = 0.0;     // ||b||^2_{H^{2s}}
    double u_l2 = 0.0;      // ||u||^2_{L2}
    double b_l2 = 0.0;      // ||b||^2_{L2}
    double gradu_l2 = 0.0;  // ||grad u||^2_{L2}
    double dissipated = 0.0;
};

inline const std::vector<std::pair<std::string, double NormSample::*>>& norm_sample_columns() {
    static const std::vector<std::pair<std::string, double NormSample::*>> cols = {
        {"u_H2s1", &NormSample::u_h2s1},       {"b_H2s1", &NormSample::b_h2s1},
        {"u_H2s2", &NormSample::u_h2s2},       {"d3b_H2s", &NormSample::d3b_h2s},
        {"d3u_H2s", &NormSample::d3u_h2s},     {"d3u_H2s1", &NormSample::d3u_h2s1},
        {"d3u_H2sm2", &NormSample::d3u_h2sm2}, {"d3b_H2sm2", &NormSample::d3b_h2sm2},
        {"d3u_H2sm1", &NormSample::d3u_h2sm1}, {"u_H2sm2", &NormSample::u_h2sm2},
        {"u_H2sm1", &NormSample::u_h2sm1},     {"d3b_H2sm3", &NormSample::d3b_h2sm3},
        {"b_H2s", &NormSample::b_h2s},         {"u_L2", &NormSample::u_l2},
        {"b_L2", &NormSample::b_l2},           {"gradu_L2", &NormSample::gradu_l2},
        {"dissipated", &NormSample::dissipated}};
    return cols;
}

// Evaluates a full NormSample in one fixed-order sweep over modes using
// precomputed H^k multiplier tables; the serial reduction order makes runs
// bit-reproducible.
class NormEvaluator {
public:
    NormEvaluator(const Grid& grid, const EnergyConfig& cfg) : grid_(grid), s_(cfg.s) {
        cfg.validate();
        const int base = 2 * s_;
        const std::array<int, 6> orders = {base + 2, base + 1, base, base - 1, base - 2, base - 3};
        const std::size_t m = grid.size();
        for (int i = 0; i < 6; ++i) w_[i].resize(m);
        k3sq_.resize(m);
        ksq_.resize(m);
        for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
            for (int i = 0; i < 6; ++i)
                w_[i][idx] = detail::sobolev_multiplier(orders[i], k1, k2, k3);
            k3sq_[idx] = static_cast<double>(k3) * k3;
            ksq_[idx] = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                        static_cast<double>(k3) * k3;
        });
    }

    int s() const { return s_; }

    NormSample sample(const MhdState& state) const {
        NormSample out;
        out.t = state.time;
        out.dissipated = state.dissipated;
        const std::size_t m = grid_.size();
        // w_ index: 0 -> 2s+2, 1 -> 2s+1, 2 -> 2s, 3 -> 2s-1, 4 -> 2s-2, 5 -> 2s-3
        for (std::size_t idx = 0; idx < m; ++idx) {
            double uu = 0.0, bb = 0.0;
            for (int i = 0; i < 3; ++i) {
                uu += std::norm(state.u[i].c[idx]);
                bb += std::norm(state.b[i].c[idx]);
            }
            if (uu == 0.0 && bb == 0.0) continue;
            const double k3sq = k3sq_[idx];
            out.u_h2s1 += w_[1][idx] * uu;
            out.b_h2s1 += w_[1][idx] * bb;
            out.u_h2s2 += w_[0][idx] * uu;
            out.d3b_h2s += k3sq * w_[2][idx] * bb;
            out.d3u_h2s += k3sq * w_[2][idx] * uu;
            out.d3u_h2s1 += k3sq * w_[1][idx] * uu;
            out.d3u_h2sm2 += k3sq * w_[4][idx] * uu;
            out.d3b_h2sm2 += k3sq * w_[4][idx] * bb;
            out.d3u_h2sm1 += k3sq * w_[3][idx] * uu;
            out.u_h2sm2 += w_[4][idx] * uu;
            out.u_h2sm1 += w_[3][idx] * uu;
            out.d3b_h2sm3 += k3sq * w_[5][idx] * bb;
            out.b_h2s += w_[2][idx] * bb;
            out.u_l2 += uu;
            out.b_l2 += bb;
            out.gradu_l2 += ksq_[idx] * uu;
        }
        const double vol = Grid::volume();
        for (const auto& [name, member] : norm_sample_columns())
            if (member != &NormSample::dissipated) out.*member *= vol;
        for (const auto& [name, member] : norm_sample_columns())
            if (!std::isfinite(out.*member)) throw NonFinite("norm overflow: " + name);
        return out;
    }

private:
    Grid grid_;
    int s_;
    std::array<std::vector<double>, 6> w_;
    std::vector<double> k3sq_, ksq_;
};

// One time-weighted energy: a running sup plus up to two weighted time
// integrals accumulated by trapezoid between consecutive samples.
struct Energy {
    double sup = 0.0;
    double int1 = 0.0;
    double int2 = 0.0;
    double total() const { return sup + int1 + int2; }
};

struct EnergyTotals {
    double e0_high = 0.0; // E0
    double g0 = 0.0;      // G0
    double g1 = 0.0;      // G1
    double e1 = 0.0;      // E1
    double e0_low = 0.0;  // e0
    double total = 0.0;   // E_total
};

struct DecayFit {
    std::string quantity;
    double slope = 0.0;     // d log y / d log(1+t)
    double amplitude = 0.0; // fitted y at t = 0
    double t_lo = 0.0;
    double t_hi = 0.0;
    double residual_rms = 0.0;
    int samples = 0;
};

struct BoundednessEntry {
    double final_value = 0.0;
    double tail_ratio = 0.0; // max over last quarter / max over second quarter
    bool bounded = false;
};

// Running suprema and quadratures realizing the five time-weighted energies
//
//   E0 = sup (1+t)^{-sigma} (||u||^2_{H^{2s+1}} + ||b||^2_{H^{2s+1}})
//        + int (1+t)^{-1-sigma} (||u||^2_{H^{2s+1}} + ||b||^2_{H^{2s+1}})
//        + int (1+t)^{-sigma}   (||u||^2_{H^{2s+2}} + ||d3 b||^2_{H^{2s}})
//   G0 = sup (1+t)^{1-sigma} (||d3 u||^2_{H^{2s}} + ||d3 b||^2_{H^{2s}})
//        + int (1+t)^{1-sigma} ||d3 u||^2_{H^{2s+1}}
//   G1 = sup (1+t)^{3-sigma} (||d3 u||^2_{H^{2s-2}} + ||d3 b||^2_{H^{2s-2}})
//        + int (1+t)^{3-sigma} ||d3 u||^2_{H^{2s-1}}
//   E1 = sup (1+t)^{3-sigma} ||u||^2_{H^{2s-2}}
//        + int (1+t)^{3-sigma} (||u||^2_{H^{2s-1}} + ||d3 b||^2_{H^{2s-3}})
//   e0 = sup ||b||^2_{H^{2s}}
//
// and E_total = E0 + G0 + G1 + E1 + e0. Sampled suprema are lower bounds of
// the continuum ones; integrals carry O(h^2) trapezoid error.
class EnergyLedger {
public:
    explicit EnergyLedger(const EnergyConfig& cfg) : cfg_(cfg) { cfg.validate(); }

    const EnergyConfig& config() const { return cfg_; }
    const std::vector<NormSample>& samples() const { return samples_; }
    const std::vector<EnergyTotals>& energy_history() const { return energy_history_; }

    void update(const NormSample& sample) {
        if (!samples_.empty() && sample.t < samples_.back().t)
            throw NonMonotoneTime("ledger sample at t = " + std::to_string(sample.t) +
                                  " precedes t = " + std::to_string(samples_.back().t));
        const double sigma = cfg_.sigma;
        const double w_m1ms = std::pow(1.0 + sample.t, -1.0 - sigma);
        const double w_ms = std::pow(1.0 + sample.t, -sigma);
        const double w_1ms = std::pow(1.0 + sample.t, 1.0 - sigma);
        const double w_3ms = std::pow(1.0 + sample.t, 3.0 - sigma);

        Integrands now;
        now.e0_int1 = w_m1ms * (sample.u_h2s1 + sample.b_h2s1);
        now.e0_int2 = w_ms * (sample.u_h2s2 + sample.d3b_h2s);
        now.g0_int = w_1ms * sample.d3u_h2s1;
        now.g1_int = w_3ms * sample.d3u_h2sm1;
        now.e1_int = w_3ms * (sample.u_h2sm1 + sample.d3b_h2sm3);

        if (!samples_.empty()) {
            const double h = 0.5 * (sample.t - samples_.back().t);
            E0_.int1 += h * (prev_.e0_int1 + now.e0_int1);
            E0_.int2 += h * (prev_.e0_int2 + now.e0_int2);
            G0_.int1 += h * (prev_.g0_int + now.g0_int);
            G1_.int1 += h * (prev_.g1_int + now.g1_int);
            E1_.int1 += h * (prev_.e1_int + now.e1_int);
        }
        E0_.sup = std::max(E0_.sup, w_ms * (sample.u_h2s1 + sample.b_h2s1));
        G0_.sup = std::max(G0_.sup, w_1ms * (sample.d3u_h2s + sample.d3b_h2s));
        G1_.sup = std::max(G1_.sup, w_3ms * (sample.d3u_h2sm2 + sample.d3b_h2sm2));
        E1_.sup = std::max(E1_.sup, w_3ms * sample.u_h2sm2);
        e0_ = std::max(e0_, sample.b_h2s);

        prev_ = now;
        samples_.push_back(sample);
        energy_history_.push_back(totals());
        balance_history_.push_back(balance_residual_at(samples_.size() - 1));
    }

    const Energy& E0() const { return E0_; }
    const Energy& G0() const { return G0_; }
    const Energy& G1() const { return G1_; }
    const Energy& E1() const { return E1_; }
    double e0() const { return e0_; }

    EnergyTotals totals() const {
        EnergyTotals t;
        t.e0_high = E0_.total();
        t.g0 = G0_.total();
        t.g1 = G1_.total();
        t.e1 = E1_.total();
        t.e0_low = e0_;
        t.total = t.e0_high + t.g0 + t.g1 + t.e1 + t.e0_low;
        return t;
    }

    // 1/2(||u||^2+||b||^2)(t) - 1/2(...)(0) + nu int_0^t ||grad u||^2, using the
    // integrator's scheme-order dissipation quadrature; ~0 when the discrete
    // transport/coupling cancellations hold.
    double balance_residual() const {
        if (samples_.size() < 2) return 0.0;
        return balance_residual_at(samples_.size() - 1);
    }

    const std::vector<double>& balance_history() const { return balance_history_; }

    double max_abs_balance_residual() const {
        double m = 0.0;
        for (double r : balance_history_) m = std::max(m, std::abs(r));
        return m;
    }

    DecayFit fit_decay(const std::string& quantity, double t_lo, double t_hi) const {
        std::vector<double> ts, ys;
        auto accessor = sample_accessor(quantity);
        for (const auto& s : samples_)
            if (s.t >= t_lo && s.t <= t_hi) {
                ts.push_back(s.t);
                ys.push_back(accessor(s));
            }
        DecayFit fit = fit_power_law(ts, ys);
        fit.quantity = quantity;
        fit.t_lo = t_lo;
        fit.t_hi = t_hi;
        return fit;
    }

    // Scale-free tail test per energy: BOUNDED when
    // max(last quarter)/max(second quarter) <= 1.5. Requires the run to span
    // two decades of (1+t).
    std::map<std::string, BoundednessEntry> boundedness_verdict() const {
        if (samples_.size() < 8) throw RunTooShort("need at least 8 samples");
        const double span = (1.0 + samples_.back().t) / (1.0 + samples_.front().t);
        if (span < 100.0)
            throw RunTooShort("run covers " + std::to_string(std::log10(span)) +
                              " decades of (1+t); need 2");
        std::map<std::string, BoundednessEntry> out;
        const auto series = [&](double EnergyTotals::*member) {
            std::vector<double> v(energy_history_.size());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = energy_history_[i].*member;
            return v;
        };
        out["E0"] = tail_entry(series(&EnergyTotals::e0_high));
        out["G0"] = tail_entry(series(&EnergyTotals::g0));
        out["G1"] = tail_entry(series(&EnergyTotals::g1));
        out["E1"] = tail_entry(series(&EnergyTotals::e1));
        out["e0"] = tail_entry(series(&EnergyTotals::e0_low));
        out["Etotal"] = tail_entry(series(&EnergyTotals::total));
        return out;
    }

    static BoundednessEntry tail_entry(const std::vector<double>& series) {
        const std::size_t n = series.size();
        const std::size_t q = n / 4;
        double second = 0.0, last = 0.0;
        for (std::size_t i = q; i < 2 * q; ++i) second = std::max(second, series[i]);
        for (std::size_t i = 3 * q; i < n; ++i) last = std::max(last, series[i]);
        BoundednessEntry e;
        e.final_value = series.back();
        if (second == 0.0)
            e.tail_ratio = (last == 0.0) ? 1.0 : std::numeric_limits<double>::infinity();
        else
            e.tail_ratio = last / second;
        e.bounded = e.tail_ratio <= 1.5;
        return e;
    }

    std::function<double(const NormSample&)> sample_accessor(const std::string& quantity) const {
        for (const auto& [name, member] : norm_sample_columns())
            if (name == quantity)
                return [member](const NormSample& s) { return s.*member; };
        if (quantity == "t") return [](const NormSample& s) { return s.t; };
        throw ValidationError("quantity", "unknown norm column '" + quantity + "'");
    }

private:
    struct Integrands {
        double e0_int1 = 0.0, e0_int2 = 0.0, g0_int = 0.0, g1_int = 0.0, e1_int = 0.0;
    };

    double balance_residual_at(std::size_t i) const {
        const NormSample& first = samples_.front();
        const NormSample& s = samples_[i];
        return 0.5 * (s.u_l2 + s.b_l2) - 0.5 * (first.u_l2 + first.b_l2) +
               (s.dissipated - first.dissipated);
    }

    EnergyConfig cfg_;
    std::vector<NormSample> samples_;
    std::vector<EnergyTotals> energy_history_;
    std::vector<double> balance_history_;
    Energy E0_, G0_, G1_, E1_;
    double e0_ = 0.0;
    Integrands prev_;

public:
    // Least-squares slope of log y against log(1+t); the shared core of
    // fit_decay and the CLI `fit` subcommand.
    static DecayFit fit_power_law(const std::vector<double>& ts, const std::vector<double>& ys) {
        if (ts.size() < 8) throw InsufficientData("need at least 8 samples in the fit window");
        for (double y : ys)
            if (!(y > 0.0)) throw NonPositiveValues("fit requires positive values");
        const std::size_t n = ts.size();
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = std::log1p(ts[i]);
            const double y = std::log(ys[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double denom = n * sxx - sx * sx;
        if (denom == 0.0) throw InsufficientData("degenerate fit window");
        DecayFit fit;
        fit.slope = (n * sxy - sx * sy) / denom;
        const double intercept = (sy - fit.slope * sx) / n;
        fit.amplitude = std::exp(intercept);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = std::log(ys[i]) - (intercept + fit.slope * std::log1p(ts[i]));
            ss += r * r;
        }
        fit.residual_rms = std::sqrt(ss / n);
        fit.samples = static_cast<int>(n);
        return fit;
    }
};

inline NormSample sample_norms(const MhdState& state, const EnergyConfig& cfg) {
    return NormEvaluator(state.grid(), cfg).sample(state);
}

inline EnergyLedger update_ledger(EnergyLedger ledger, const NormSample& sample) {
    ledger.update(sample);
    return ledger;
}

} // namespace mhdbox
