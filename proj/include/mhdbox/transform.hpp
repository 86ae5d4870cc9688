#pragma once

#include <fftw3.h>

#include <mutex>
#include <span>
#include <vector>

#include "mhdbox/field.hpp"

namespace mhdbox {

// FFTW-backed transforms between grid samples on [-pi,pi)^3 and the
// coefficients of f(x) = sum_k c(k) e^{i k.x}.
//
// The grid origin sits at -pi while the DFT assumes 0, which contributes a
// phase e^{i pi (k1+k2+k3)} = (-1)^{i1+i2+i3} per mode (N even). The forward
// direction also divides by N^3. Plans use FFTW_ESTIMATE so planning is
// heuristic and repeatable; buffers come from fftw_malloc and each engine
// owns its own, so concurrent engines never share workspace.
class FourierTransform {
public:
    explicit FourierTransform(int n) : n_(n), size_(static_cast<std::size_t>(n) * n * n) {
        buf_ = fftw_alloc_complex(size_);
        {
            std::lock_guard lock(planner_mutex());
            fwd_ = fftw_plan_dft_3d(n, n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_3d(n, n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        phase_.resize(size_);
        std::size_t idx = 0;
        for (int i1 = 0; i1 < n_; ++i1)
            for (int i2 = 0; i2 < n_; ++i2)
                for (int i3 = 0; i3 < n_; ++i3, ++idx)
                    phase_[idx] = ((i1 + i2 + i3) & 1) ? -1.0 : 1.0;
    }

    ~FourierTransform() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }

    FourierTransform(const FourierTransform&) = delete;
    FourierTransform& operator=(const FourierTransform&) = delete;

    int n() const { return n_; }

    SpectralField forward(std::span<const double> values, const Grid& grid) {
        if (grid.n != n_ || values.size() != size_)
            throw DimensionMismatch("sample array does not match the configured grid");
        SpectralField out(grid);
        forward_into(values, out);
        return out;
    }

    void forward_into(std::span<const double> values, SpectralField& out) {
        if (out.grid.n != n_ || values.size() != size_)
            throw DimensionMismatch("sample array does not match the configured grid");
        for (std::size_t i = 0; i < size_; ++i) {
            buf_[i][0] = values[i];
            buf_[i][1] = 0.0;
        }
        fftw_execute(fwd_);
        const double scale = 1.0 / static_cast<double>(size_);
        apply_phase_and_scale(out.c.data(), scale);
    }

    std::vector<double> inverse(const SpectralField& f) {
        std::vector<double> out(size_);
        inverse_into(f, out);
        return out;
    }

    void inverse_into(const SpectralField& f, std::span<double> out) {
        if (f.grid.n != n_ || out.size() != size_)
            throw DimensionMismatch("field does not match the configured grid");
        load_phased(f.c.data());
        fftw_execute(bwd_);
        for (std::size_t i = 0; i < size_; ++i) out[i] = buf_[i][0];
    }

private:
    static std::mutex& planner_mutex() {
        static std::mutex m; // FFTW planner is not thread-safe
        return m;
    }

    // out[i] = buf[i] * (-1)^{i1+i2+i3} * scale
    void apply_phase_and_scale(Complex* out, double scale) const {
        for (std::size_t idx = 0; idx < size_; ++idx) {
            const double s = phase_[idx] * scale;
            out[idx] = Complex{buf_[idx][0] * s, buf_[idx][1] * s};
        }
    }

    void load_phased(const Complex* in) {
        for (std::size_t idx = 0; idx < size_; ++idx) {
            const double s = phase_[idx];
            buf_[idx][0] = in[idx].real() * s;
            buf_[idx][1] = in[idx].imag() * s;
        }
    }

    int n_;
    std::size_t size_;
    fftw_complex* buf_;
    fftw_plan fwd_, bwd_;
    std::vector<double> phase_; // (-1)^{i1+i2+i3}, the [-pi,pi) origin shift
};

// One-shot conveniences; hot loops should hold a FourierTransform instead.
inline SpectralField transform_forward(const std::vector<double>& values, const Grid& grid) {
    FourierTransform fft(grid.n);
    return fft.forward(values, grid);
}

inline std::vector<double> transform_inverse(const SpectralField& f) {
    FourierTransform fft(f.grid.n);
    return fft.inverse(f);
}

} // namespace mhdbox
